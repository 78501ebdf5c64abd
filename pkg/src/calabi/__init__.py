"""Shooting solver and invariant checks for momentum-constructed higher cscK metrics."""

__version__ = "0.1.0"
