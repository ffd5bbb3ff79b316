"""Finite orthomodular lattices, global valuations, the possibility
operator, Kochen-Specker colorings, and powers with Born-rule potentia."""

__version__ = "0.1.0"
