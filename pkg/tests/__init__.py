"""Tests for coev-grid."""
