"""Translate pure Standard ML with contracts into Coq/Gallina (Equations style)."""

__version__ = "0.1.0"
