"""Curve specifications: segments, arcs, coordinate squares and named loops."""

import json
import logging
import math
import re
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..errors import ConfigurationError
from ..models import ArcPiece, CurveSpec, SegmentPiece

logger = logging.getLogger(__name__)

CONTINUITY_TOL = 1e-12


def piece_point(piece, tau: float) -> np.ndarray:
    if piece.kind == "segment":
        start = np.asarray(piece.start, dtype=float)
        return start + tau * (np.asarray(piece.end, dtype=float) - start)
    phi = piece.phi0 + tau * (piece.phi1 - piece.phi0)
    return np.asarray(piece.center, dtype=float) + piece.radius * (
        math.cos(phi) * np.asarray(piece.u, dtype=float)
        + math.sin(phi) * np.asarray(piece.v, dtype=float)
    )


def curve_start(curve: CurveSpec) -> np.ndarray:
    return piece_point(curve.pieces[0], 0.0)


def curve_end(curve: CurveSpec) -> np.ndarray:
    return piece_point(curve.pieces[-1], 1.0)


def validate_curve(curve: CurveSpec, dim: int) -> None:
    """Every piece lives in the chart dimension and consecutive pieces join."""
    for index, piece in enumerate(curve.pieces):
        vectors = [piece.start, piece.end] if piece.kind == "segment" else [piece.center, piece.u, piece.v]
        if any(len(v) != dim for v in vectors):
            raise ConfigurationError(f"Piece {index} of curve '{curve.name}' is not {dim}-dimensional")
    for index in range(1, len(curve.pieces)):
        gap = np.linalg.norm(piece_point(curve.pieces[index - 1], 1.0) - piece_point(curve.pieces[index], 0.0))
        if gap > CONTINUITY_TOL:
            raise ConfigurationError(
                f"Curve '{curve.name}' is discontinuous between pieces {index - 1} and {index} (gap {gap:.3e})"
            )


def is_closed(curve: CurveSpec) -> bool:
    if not curve.pieces:
        return True
    return bool(np.linalg.norm(curve_end(curve) - curve_start(curve)) <= CONTINUITY_TOL)


def polyline(vertices: Sequence[Sequence[float]], name: str = "polyline") -> CurveSpec:
    points = [list(map(float, v)) for v in vertices]
    if len(points) < 2:
        raise ConfigurationError("A polyline needs at least two vertices")
    pieces = [SegmentPiece(start=a, end=b) for a, b in zip(points[:-1], points[1:])]
    return CurveSpec(name=name, pieces=pieces)


def parallelogram_loop(x, X, Y, t: float, name: Optional[str] = None) -> CurveSpec:
    """x -> x + tX -> x + tX + tY -> x + tY -> x."""
    x = np.asarray(x, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    vertices = [x, x + t * X, x + t * X + t * Y, x + t * Y, x]
    return polyline(vertices, name=name or f"parallelogram(t={t})")


def square_loop(x, plane: Tuple[int, int], side: float) -> CurveSpec:
    """Coordinate square of the given side in plane (i, j), 0-based, anchored at x."""
    x = np.asarray(x, dtype=float)
    i, j = plane
    if i == j or not (0 <= i < x.shape[0] and 0 <= j < x.shape[0]):
        raise ConfigurationError(f"Invalid coordinate plane {plane} for dimension {x.shape[0]}")
    X = np.zeros_like(x)
    X[i] = 1.0
    Y = np.zeros_like(x)
    Y[j] = 1.0
    return parallelogram_loop(x, X, Y, side, name=f"square(plane={i + 1}{j + 1}, side={side})")


def octant_loop(dim: int = 3) -> CurveSpec:
    """Geodesic octant of the unit sphere in stereographic coordinates: 0 -> e1 -> e2 -> 0."""
    if dim < 2:
        raise ConfigurationError("The octant loop needs dimension >= 2")
    origin = [0.0] * dim
    e1 = [1.0] + [0.0] * (dim - 1)
    e2 = [0.0, 1.0] + [0.0] * (dim - 2)
    return CurveSpec(
        name="octant",
        pieces=[
            SegmentPiece(start=origin, end=e1),
            ArcPiece(center=origin, u=e1, v=e2, radius=1.0, phi0=0.0, phi1=math.pi / 2),
            SegmentPiece(start=e2, end=origin),
        ],
    )


def reverse_curve(curve: CurveSpec) -> CurveSpec:
    """The same curve traversed backwards."""
    pieces = []
    for piece in reversed(curve.pieces):
        if piece.kind == "segment":
            pieces.append(SegmentPiece(start=piece.end, end=piece.start))
        else:
            pieces.append(piece.model_copy(update={"phi0": piece.phi1, "phi1": piece.phi0}))
    return CurveSpec(name=f"reverse({curve.name})", pieces=pieces)


inverse_loop = reverse_curve


def concatenate(first: CurveSpec, second: CurveSpec) -> CurveSpec:
    if not first.pieces:
        return second
    if not second.pieces:
        return first
    return CurveSpec(name=f"{first.name}*{second.name}", pieces=list(first.pieces) + list(second.pieces))


_SQUARE_RE = re.compile(r"^square\((?P<args>.*)\)$")


def parse_curve(text: str, base_point, dim: int) -> CurveSpec:
    """Curve from a CLI string.

    Accepted forms: ``octant``, ``square(plane=13, side=0.1[, anchor=[..]])``,
    ``polyline:[[..], ..]`` and ``file:<path>`` (a JSON CurveSpec).
    """
    text = text.strip()
    if text == "octant":
        curve = octant_loop(dim)
    elif text.startswith("polyline:"):
        try:
            vertices = json.loads(text[len("polyline:"):])
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"Invalid polyline vertices: {e}")
        try:
            curve = polyline(vertices)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Polyline vertices must be lists of numbers: {e}")
    elif text.startswith("file:"):
        path = text[len("file:"):]
        try:
            curve = CurveSpec.model_validate_json(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"Curve file not found: {path}")
        except ValueError as e:
            raise ConfigurationError(f"Invalid curve file {path}: {e}")
    else:
        match = _SQUARE_RE.match(text.replace(" ", ""))
        if not match:
            raise ConfigurationError(f"Unknown curve '{text}'")
        curve = _parse_square(match.group("args"), base_point, dim)
    validate_curve(curve, dim)
    return curve


def _parse_square(args: str, base_point, dim: int) -> CurveSpec:
    anchor = None
    anchor_match = re.search(r"anchor=(\[[^\]]*\])", args)
    if anchor_match:
        anchor = _parse_anchor(anchor_match.group(1))
        args = args.replace(anchor_match.group(0), "")
    options = dict(part.split("=", 1) for part in args.split(",") if "=" in part)
    plane = options.get("plane", "")
    if len(plane) != 2 or not plane.isdigit():
        raise ConfigurationError(f"square() needs plane=ij with two digits, got '{plane}'")
    try:
        side = float(options.get("side", "0.1"))
    except ValueError:
        raise ConfigurationError(f"Invalid square side '{options.get('side')}'")
    x = np.asarray(anchor if anchor is not None else base_point, dtype=float)
    if x.shape != (dim,):
        raise ConfigurationError(f"square() anchor must be a {dim}-vector")
    return square_loop(x, (int(plane[0]) - 1, int(plane[1]) - 1), side)


def _parse_anchor(text: str) -> List[float]:
    try:
        values = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"Invalid square anchor '{text}': {e}")
    if not isinstance(values, list) or not all(
        isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
    ):
        raise ConfigurationError(f"square() anchor must be a list of numbers, got '{text}'")
    return [float(v) for v in values]
