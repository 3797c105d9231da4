"""Heights, orbit counting and equidistribution experiments for Diophantine approximation
in real and complex hyperbolic geometry."""

__version__ = "0.1.0"
