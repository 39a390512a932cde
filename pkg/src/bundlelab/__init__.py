"""Exact computations with vector bundles on projective space given by polynomial matrices."""
