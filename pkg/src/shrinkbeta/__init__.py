"""Coin-driven beta-expansions with a shrinking switch region.

For each n >= 3, beta_n in (1, golden ratio) solves
sum_{t=2..n} beta^-t = 1. The map x -> beta*x (mod a digit) on
[0, 1/(beta-1)] consults a coin only on the switch interval
[a, b] = [1/(beta^2-1), beta/(beta^2-1)]; its first-return dynamics on the
switch interval, symbolic codings, interval Markov chains, maximal-entropy
measures and invariant lifts live in the submodules re-exported here.
"""

from .algebra import (AlgebraicBeta, PerronValue, eval_word, solve_beta,
                      solve_lambda)
from .dynamics import (CoinStream, PointState, induced_step, orbit,
                       return_time, step)
from .errors import (DeletedPointError, InequalityViolationError,
                     InvariantViolationError, OrbitEscapeError,
                     ShrinkBetaError, StreamExhaustedError)
from .gls import (GlsPartition, ReturnTimeVector, apply_greedy, apply_lazy,
                  greedy_breakpoints, lazy_breakpoints, return_time_law,
                  return_time_vector)
from .kernels import BACKEND
from .markov import (MarkovChain, build_adjacency, build_chain,
                     build_partition, check_inequality, eigen_closed_form,
                     induced_parry_entropy, parry_measure, sample_chain)
from .measures import (CylinderSpec, InducedMeasureSpec, abramov_check,
                       cylinder_preimage_interval, empirical_entropy,
                       entropy_rate_estimate, integral_tau, kac_lift,
                       pushforward_check)
from .symbolic import (SymbolicWord, alphabet, boundary_expansions, decode,
                       encode, mme_entropy)

__version__ = "0.1.0"

__all__ = [
    "AlgebraicBeta", "PerronValue", "eval_word", "solve_beta", "solve_lambda",
    "CoinStream", "PointState", "induced_step", "orbit", "return_time", "step",
    "ShrinkBetaError", "OrbitEscapeError", "StreamExhaustedError",
    "DeletedPointError", "InvariantViolationError", "InequalityViolationError",
    "GlsPartition", "ReturnTimeVector", "apply_greedy", "apply_lazy",
    "greedy_breakpoints", "lazy_breakpoints", "return_time_law",
    "return_time_vector", "BACKEND", "MarkovChain", "build_adjacency",
    "build_chain", "build_partition", "check_inequality", "eigen_closed_form",
    "induced_parry_entropy", "parry_measure", "sample_chain", "CylinderSpec",
    "InducedMeasureSpec", "abramov_check", "cylinder_preimage_interval",
    "empirical_entropy", "entropy_rate_estimate", "integral_tau", "kac_lift",
    "pushforward_check", "SymbolicWord", "alphabet", "boundary_expansions",
    "decode", "encode", "mme_entropy", "__version__",
]
