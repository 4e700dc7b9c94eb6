"""Exact computation modulo random composites instead of random primes.

Dynamic evaluation modulo a random ``2b``-bit integer (or a random monic
polynomial over GF(q)) reproduces, with constant probability, a run modulo a
random large prime, without ever testing primality.  The main application is
counting the nonzero terms of a sparse integer polynomial from a modular
black box.
"""

from .dyncore import BOTTOM, Bottom, DynContext, NotInvertible, mod_inverse, mod_pow, new_modulus, replay_check
from .prng import PrngState, correlated_sample, rand_mod, rand_update, sample_initial_modulus
from .sparsity import (
    SparsePoly, amplify_sparsity, bit_length_bound, bm_early_terminate, get_sparsity_integer,
    get_sparsity_mod_q, mbb_from_sparse_poly,
)

__version__ = "0.1.0"
