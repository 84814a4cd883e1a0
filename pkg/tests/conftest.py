"""Anchors the test root so that ``import helpers`` works everywhere."""
