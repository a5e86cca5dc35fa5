"""Tests for the henon_morse package."""
