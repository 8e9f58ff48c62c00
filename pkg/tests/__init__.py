"""Tests for dicke_sim."""
