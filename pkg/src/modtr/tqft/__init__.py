"""Frobenius-algebra layer: TQFT amplitudes, fatgraphs, Verlinde ranks, conformal blocks."""

from .algebra import (
    AxiomError,
    FrobeniusAlgebra,
    RankResidualError,
    from_modular_data,
    load_modular_data,
    su2_algebra,
    su2_fusion,
    trivial_algebra,
    verlinde_rank,
)
from .amplitudes import amplitudes_by_decomposition, pants_decompositions, tqft_amplitude
from .blocks import (
    algebra_valued_volume,
    conformal_block_twist,
    rank_factorization_residual,
    specialize_weights,
    torus_ranks,
)
from .fatgraphs import Fatgraph, enumerate_by_matchings, enumerate_by_rotations, fatgraph_enumerate, strict_gr_sum
