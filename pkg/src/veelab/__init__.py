"""Trigonometric prepotentials of vector configurations and their identity fields."""
