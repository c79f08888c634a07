"""exactdom - convex best dominants of exact differential subordinations."""

__version__ = "1.0.0"
