"""Exact and numerical checks of infinite determinacy for germs vanishing to second order on a variety."""
__version__ = "0.1.0"
