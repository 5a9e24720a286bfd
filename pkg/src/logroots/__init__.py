"""Root localization and limit-process simulation for random polynomials
whose coefficient log-moduli have power-law tails."""

__version__ = "0.1.0"
