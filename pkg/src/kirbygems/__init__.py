"""Gems of compact PL 4-manifolds: Kirby diagrams, moves, trisections."""

from .colored_graph import (ColoredGraph, CyclicPermutation, EmbeddingSurface,
                            Residue, connected_sum, standard_sphere_graph)
from .homology import homology, build_complex, HomologyReport

__all__ = [
    "ColoredGraph", "CyclicPermutation", "EmbeddingSurface", "Residue",
    "connected_sum", "standard_sphere_graph", "homology", "build_complex",
    "HomologyReport",
]
