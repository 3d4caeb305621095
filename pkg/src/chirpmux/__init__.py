"""Multi-user chirp spread spectrum waveforms and link analysis.

Synthesis of linear, sinusoidal, and quartic chirp signal sets that share
one band; cross-correlation of delayed set members (closed form, segment
approximation, numeric quadrature); analytic bit error probability for
the binary system under quasi-synchronous delays; and a Monte Carlo AWGN
link simulator with partial loading.
"""

from .ber import (
    EXACT_ENUMERATION_CAP,
    BerCurve,
    BerPoint,
    InterferenceProfile,
    Interferer,
    b_vectors,
    ber_exact,
    ber_exact_from_rho,
    ber_gaussian_delay_avg,
    ber_sampled,
    rho_vector,
)
from .correlation import (
    DEFAULT_SEGMENTS,
    CorrelationResult,
    CorrelationStats,
    SegmentModel,
    build_segment_model,
    cross_correlation,
    mean_xcorr_vs_delay,
    xcorr_histogram,
    xcorr_linear_closed,
    xcorr_quadrature,
    xcorr_segmented,
)
from .simulator import (
    FixedDelays,
    GaussianDelays,
    LinkConfig,
    SimResult,
    awgn_add,
    modulate,
    run_link_sim,
    select_partial_load,
)
from .specfun import QuadPhaseIntegral, erfi, q_function, quad_phase_integral, quad_phase_values
from .waveforms import (
    ChirpFamily,
    ChirpWaveform,
    PhaseFunction,
    SignalSetSpec,
    chirp_phase,
    chirp_rate,
    delayed,
    instantaneous_frequency,
    phase_function,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "ChirpFamily",
    "ChirpWaveform",
    "PhaseFunction",
    "SignalSetSpec",
    "chirp_phase",
    "chirp_rate",
    "delayed",
    "instantaneous_frequency",
    "phase_function",
    "synthesize",
    "QuadPhaseIntegral",
    "erfi",
    "q_function",
    "quad_phase_integral",
    "quad_phase_values",
    "CorrelationResult",
    "CorrelationStats",
    "SegmentModel",
    "DEFAULT_SEGMENTS",
    "build_segment_model",
    "cross_correlation",
    "mean_xcorr_vs_delay",
    "xcorr_histogram",
    "xcorr_linear_closed",
    "xcorr_quadrature",
    "xcorr_segmented",
    "EXACT_ENUMERATION_CAP",
    "BerCurve",
    "BerPoint",
    "InterferenceProfile",
    "Interferer",
    "b_vectors",
    "ber_exact",
    "ber_exact_from_rho",
    "ber_gaussian_delay_avg",
    "ber_sampled",
    "rho_vector",
    "FixedDelays",
    "GaussianDelays",
    "LinkConfig",
    "SimResult",
    "awgn_add",
    "modulate",
    "run_link_sim",
    "select_partial_load",
    "__version__",
]
