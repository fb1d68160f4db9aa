"""
Tests for biham.
"""
