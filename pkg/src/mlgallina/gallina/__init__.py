"""Gallina AST, printer and re-parse checker."""
