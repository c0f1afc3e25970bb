"""Tests for python-setreg."""
