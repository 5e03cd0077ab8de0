"""Concept controversiality estimation from sentence-level contexts."""
