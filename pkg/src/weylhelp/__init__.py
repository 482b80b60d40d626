"""Weyl m-functions, HELP inequalities and similarity diagnostics for half-line problems."""

__version__ = "0.1.0"
