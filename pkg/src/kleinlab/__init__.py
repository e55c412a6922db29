"""Exact line geometry over prime fields: Plücker coordinates, the Klein
quadric, linear line complexes and point-plane incidence counting."""

__version__ = "0.1.0"
