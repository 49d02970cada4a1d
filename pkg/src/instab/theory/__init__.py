"""Remainder profiles, the instability budget, invariant cones and differentiability probes."""
