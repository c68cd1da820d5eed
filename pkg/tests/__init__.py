"""Tests for graphshuffle."""
