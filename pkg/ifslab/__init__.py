"""ifslab - simulation and statistics laboratory for random circle homeomorphisms."""

__version__ = "0.1.0"
