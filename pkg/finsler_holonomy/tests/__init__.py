"""Tests for the Finsler Holonomy toolkit."""
