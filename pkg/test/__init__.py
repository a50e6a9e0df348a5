"""Tests for fano-mck."""
