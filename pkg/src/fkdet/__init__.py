"""Mahler measures and Fuglede-Kadison determinants over concrete group models."""
