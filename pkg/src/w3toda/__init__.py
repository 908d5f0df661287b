"""Exact and numerical toolkit for rank-2 W-symmetric boundary field theory:
descendant-field multilinear forms, a Miura-realized spin-3 current, singular
vectors and their equations-of-motion constants, Ward/BPZ linear systems,
generalized hypergeometric numerics, and a half-plane GFF/GMC Monte Carlo
layer.
"""

__version__ = "0.1.0"
