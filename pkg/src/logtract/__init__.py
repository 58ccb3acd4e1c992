"""Logarithmic-tract dynamics for entire maps with bounded singular sets:
certified ray tracing along tract itineraries, bouquet projections with an
exact affine-brush oracle, and the near-infinity conjugacy to a
disjoint-type rescaling."""

from .config import VERSION as __version__
