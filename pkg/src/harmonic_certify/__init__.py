"""Stability certificates for sparse frequency estimation.

Exponential sums with well-separated torus frequencies admit two-sided
sample-energy bounds; near-colliding pairs still admit a lower bound whose
weight degrades quadratically with the collision distance.  This package
evaluates those bounds exactly, checks them against exactly computed sample
energies and Vandermonde singular values, and combines them with a Gaussian
noise model into an a posteriori error certificate for ESPRIT-style
frequency estimates.
"""

from .bounds import (BoundReport, Variant, Verdict, WellPosednessCertificate,
                     check_main_bound, check_wellsep, main_bound_rhs,
                     pair_weights, symmetric_energy, symmetric_offsets,
                     vandermonde_bound_pairs, vandermonde_bound_separated,
                     weighted_frequency_error, wellposedness_certificate,
                     wellsep_constants)
from .estimation import (EstimationResult, default_window, esprit, estimate,
                         least_squares_coefficients)
from .exceptions import (AmbiguousMatch, ConvergenceFailure,
                         DuplicateFrequency, IllConditionedWarning,
                         ModelViolation, PreconditionViolated, RankDeficient,
                         SeparationViolated, ThresholdMismatch,
                         UnmatchedFrequencies)
from .localizing import (DilatedLocalizer, HermiteNode, hermite_interpolant,
                         phi, phi_hat, phi_hat_gap)
from .noise import (APosterioriCertificate, NoiseModel, apost_certificate,
                    gauss_norm_estimator, noise_stream, sample_noise,
                    success_probability)
from .torus import (ExponentialSum, MatchPartition, SampleGrid, energy,
                    match_partition, sample, sample_at, separation,
                    signed_wrap, wrap_distance, wrap_frequency)
from .vandermonde import (BoundKind, SigmaReport, VandermondeSpec, build,
                          sigma_min, verify_pairs, verify_separated)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
