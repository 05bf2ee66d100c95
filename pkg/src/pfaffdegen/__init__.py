"""Toric degenerations of Pfaffian Calabi-Yau threefolds and their mirror periods."""

__version__ = "0.1.0"
