"""few_distance_box: s-distance set bounds, witness polynomials and extremal search in boxes."""

__version__ = "0.1.0"
