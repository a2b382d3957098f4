"""Tests for the band model least favorable density package."""
