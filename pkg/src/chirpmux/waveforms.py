"""Multi-user chirp signal sets at complex baseband.

A set packs ``n_users`` unit-envelope chirps into the band
``[0, 2*n_users/symbol_duration)``.  User ``m`` starts at frequency ``m/T``
and sweeps one sub-band width ``n_users/T`` over the symbol, so adjacent
users are stacked ``1/T`` apart.  Three trajectory shapes are supported:
straight lines, sinusoidally perturbed lines, and quartic-phase curves
whose start/end frequencies differ.

All shapes are defined in normalized time ``tau = t/T`` and rescaled on
evaluation, which keeps the phase trajectories invariant under a change of
symbol duration.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "ChirpFamily",
    "SignalSetSpec",
    "ChirpWaveform",
    "PhaseFunction",
    "chirp_phase",
    "instantaneous_frequency",
    "chirp_rate",
    "phase_function",
    "synthesize",
    "delayed",
]


class ChirpFamily(str, Enum):
    """Shape of the time-frequency trajectory."""

    LINEAR = "linear"
    SINUSOIDAL = "sinusoidal"
    QUARTIC = "quartic"


@dataclass(frozen=True)
class SignalSetSpec:
    """Design parameters of a multi-user chirp set.

    :param family: trajectory shape shared by all users.
    :param n_users: number of signals N in the set (also the time-bandwidth
        product of each signal).
    :param symbol_duration: symbol length T in seconds.
    :param samples_per_symbol: sample grid size; defaults to ``16 * n_users``
        which is 8x the set bandwidth.  Must be at least ``4 * n_users``
        (2x bandwidth) so the synthesized set is not aliased.
    """

    family: ChirpFamily
    n_users: int
    symbol_duration: float = 1.0
    samples_per_symbol: int | None = None

    def __post_init__(self) -> None:
        family = ChirpFamily(self.family)
        object.__setattr__(self, "family", family)
        if self.n_users < 1:
            raise ValueError(f"n_users must be >= 1, got {self.n_users}")
        if not self.symbol_duration > 0:
            raise ValueError("symbol_duration must be positive")
        if self.samples_per_symbol is None:
            object.__setattr__(self, "samples_per_symbol", 16 * self.n_users)
        if self.samples_per_symbol < 4 * self.n_users:
            raise ValueError(
                "samples_per_symbol must be >= 4 * n_users "
                f"(got {self.samples_per_symbol} for N={self.n_users})"
            )

    @property
    def total_bandwidth(self) -> float:
        """Width of the shared band, ``2 N / T`` in Hz."""
        return 2.0 * self.n_users / self.symbol_duration

    @property
    def sample_period(self) -> float:
        return self.symbol_duration / self.samples_per_symbol

    def time_grid(self) -> np.ndarray:
        """Sample instants ``i * T / P`` for one symbol, ``i = 0 .. P-1``."""
        return np.arange(self.samples_per_symbol) * self.sample_period


@dataclass(frozen=True, eq=False)
class ChirpWaveform:
    """Sampled chirp symbol.

    ``delay`` is the cumulative grid-snapped cyclic delay applied to the
    samples; ``delay_residual`` is the sub-sample remainder of the most
    recent shift request.
    """

    user_index: int
    spec: SignalSetSpec
    samples: np.ndarray
    delay: float = 0.0
    delay_residual: float = 0.0


def _check_user(spec: SignalSetSpec, m: int) -> None:
    if not 0 <= m < spec.n_users:
        raise ValueError(f"user index {m} outside 0..{spec.n_users - 1}")


def _check_time(spec: SignalSetSpec, t: np.ndarray) -> None:
    if np.any(t < 0.0) or np.any(t >= spec.symbol_duration):
        raise ValueError("time must lie in [0, symbol_duration)")


# --- normalized-time cores (tau = t/T in [0, 1)) ---------------------------
#
# Linear:      phase = pi*N*(tau + m/N)^2
# Sinusoidal:  adds pi*N*(alpha/2)*tau*sin(2*tau), alpha = (2m - N)/(2N);
#              the modulation frequency is 1/pi per unit tau, so one full
#              period fits in (0, pi) and 2*pi*f0*tau reduces to 2*tau.
# Quartic:     adds 2*pi*beta*(tau^4 - 4/3 tau^3 - 1/2 tau^2) for 2m < N
#              and 2*pi*beta*(-tau^4 + 8/3 tau^3 - 3/2 tau^2 - tau) for
#              2m > N, beta = (N - 2m)/2.  At 2m = N both reduce to the
#              linear trajectory (beta = 0).
#
# The frequency/rate functions below are the analytic tau-derivatives of the
# phase divided by 2*pi; the derivative-consistency tests hold each pair to
# the phase definition.


def _alpha(n: int, m: int) -> float:
    return (2 * m - n) / (2 * n)


def _beta(n: int, m: int) -> float:
    # Largest quartic bow that keeps every trajectory inside the shared band
    # [0, 2N/T]: at m = 0 the frequency becomes (N/2) tau (2 tau - 1)^2, which
    # grazes the band floor at tau = 1/2.  Sign flips across the band centre.
    return (n - 2 * m) / 2.0


def _phase_norm(family: ChirpFamily, n: int, m: int, tau: np.ndarray) -> np.ndarray:
    base = np.pi * n * (tau + m / n) ** 2
    if family is ChirpFamily.LINEAR:
        return base
    if family is ChirpFamily.SINUSOIDAL:
        a = _alpha(n, m)
        return base + np.pi * n * (a / 2.0) * tau * np.sin(2.0 * tau)
    b = _beta(n, m)
    if 2 * m <= n:
        extra = tau**4 - (4.0 / 3.0) * tau**3 - 0.5 * tau**2
    else:
        extra = -(tau**4) + (8.0 / 3.0) * tau**3 - 1.5 * tau**2 - tau
    return base + 2.0 * np.pi * b * extra


def _freq_norm(family: ChirpFamily, n: int, m: int, tau: np.ndarray) -> np.ndarray:
    base = n * tau + m
    if family is ChirpFamily.LINEAR:
        return base
    if family is ChirpFamily.SINUSOIDAL:
        a = _alpha(n, m)
        return base + (a * n / 4.0) * np.sin(2.0 * tau) + (a * n / 2.0) * tau * np.cos(2.0 * tau)
    b = _beta(n, m)
    if 2 * m <= n:
        dev = tau * ((2.0 * tau - 1.0) ** 2 - 2.0)
    else:
        dev = (1.0 - tau) * ((2.0 * tau - 1.0) ** 2 - 2.0)
    return base + b * dev


def _rate_norm(family: ChirpFamily, n: int, m: int, tau: np.ndarray) -> np.ndarray:
    if family is ChirpFamily.LINEAR:
        return np.full_like(np.asarray(tau, dtype=float), float(n))
    if family is ChirpFamily.SINUSOIDAL:
        a = _alpha(n, m)
        return n + a * n * np.cos(2.0 * tau) - a * n * tau * np.sin(2.0 * tau)
    b = _beta(n, m)
    if 2 * m <= n:
        dev = 12.0 * tau**2 - 8.0 * tau - 1.0
    else:
        dev = -12.0 * tau**2 + 16.0 * tau - 3.0
    return n + b * dev


def _phase_unchecked(spec: SignalSetSpec, m: int, t: np.ndarray) -> np.ndarray:
    return _phase_norm(spec.family, spec.n_users, m, np.asarray(t, dtype=float) / spec.symbol_duration)


def _freq_unchecked(spec: SignalSetSpec, m: int, t: np.ndarray) -> np.ndarray:
    tau = np.asarray(t, dtype=float) / spec.symbol_duration
    return _freq_norm(spec.family, spec.n_users, m, tau) / spec.symbol_duration


def _rate_unchecked(spec: SignalSetSpec, m: int, t: np.ndarray) -> np.ndarray:
    tau = np.asarray(t, dtype=float) / spec.symbol_duration
    return _rate_norm(spec.family, spec.n_users, m, tau) / spec.symbol_duration**2


def chirp_phase(spec: SignalSetSpec, m: int, t):
    """Instantaneous phase of user ``m`` in radians at time(s) ``t``.

    ``t`` may be a scalar or array in ``[0, symbol_duration)``.
    """
    _check_user(spec, m)
    t = np.asarray(t, dtype=float)
    _check_time(spec, t)
    out = _phase_unchecked(spec, m, t)
    return out if out.ndim else float(out)


def instantaneous_frequency(spec: SignalSetSpec, m: int, t):
    """Instantaneous frequency of user ``m`` in Hz at time(s) ``t``."""
    _check_user(spec, m)
    t = np.asarray(t, dtype=float)
    _check_time(spec, t)
    out = _freq_unchecked(spec, m, t)
    return out if out.ndim else float(out)


def chirp_rate(spec: SignalSetSpec, m: int, t):
    """Time derivative of the instantaneous frequency, in Hz/s."""
    _check_user(spec, m)
    t = np.asarray(t, dtype=float)
    _check_time(spec, t)
    out = _rate_unchecked(spec, m, t)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PhaseFunction:
    """Callable phase trajectory of one user, evaluable anywhere in [0, T)."""

    family: ChirpFamily
    user_index: int
    n_users: int
    symbol_duration: float

    def __call__(self, t):
        spec = SignalSetSpec(self.family, self.n_users, self.symbol_duration)
        return chirp_phase(spec, self.user_index, t)


def phase_function(spec: SignalSetSpec, m: int) -> PhaseFunction:
    _check_user(spec, m)
    return PhaseFunction(spec.family, m, spec.n_users, spec.symbol_duration)


def synthesize(spec: SignalSetSpec, m: int) -> ChirpWaveform:
    """Sample user ``m``'s unit-envelope chirp on the spec's time grid."""
    _check_user(spec, m)
    phase = _phase_unchecked(spec, m, spec.time_grid())
    return ChirpWaveform(user_index=m, spec=spec, samples=np.exp(1j * phase))


def delayed(waveform: ChirpWaveform, delay: float) -> ChirpWaveform:
    """Cyclically delay a sampled symbol by ``delay`` seconds.

    The tail that would spill past the symbol end wraps around to the
    beginning, i.e. the output is ``w(t - delay)`` for ``t >= delay`` and
    ``w(t + T - delay)`` before that.  The delay is reduced modulo T and
    rounded to the nearest sample; the rounding remainder is reported in
    ``delay_residual``.
    """
    if delay < 0:
        raise ValueError("delay must be non-negative")
    spec = waveform.spec
    dt = spec.sample_period
    reduced = delay % spec.symbol_duration
    shift = int(round(reduced / dt)) % spec.samples_per_symbol
    applied = shift * dt
    return ChirpWaveform(
        user_index=waveform.user_index,
        spec=spec,
        samples=np.roll(waveform.samples, shift),
        delay=(waveform.delay + applied) % spec.symbol_duration,
        delay_residual=reduced - applied,
    )
