"""Tests for the fairpool library."""
