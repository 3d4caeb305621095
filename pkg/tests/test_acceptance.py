"""System-level acceptance suite: eleven numbered criteria.

Each test prints one ``criterion NN: PASS/FAIL`` line (with measured
margins) and asserts it, so ``pytest -v`` yields one status line per
criterion.  Runtime is dominated by criterion 8, which replays twelve
link configurations at a million bits per operating point; the whole
module takes several minutes.

All Monte Carlo configurations here are frozen (seeds, budgets, sample
rates), so every run reproduces the same numbers exactly.
"""

import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from chirpmux.ber import InterferenceProfile, Interferer, ber_exact
from chirpmux.correlation import (
    mean_xcorr_vs_delay,
    xcorr_histogram,
    xcorr_linear_closed,
    xcorr_quadrature,
    xcorr_quadrature_matrix,
    xcorr_segmented,
)
from chirpmux.simulator import FixedDelays, GaussianDelays, LinkConfig, run_link_sim
from chirpmux.specfun import QuadPhaseIntegral, erfi, q_function, quad_phase_integral
from chirpmux.waveforms import ChirpFamily, SignalSetSpec

pytestmark = pytest.mark.slow


def _spec(family: str, n: int, spp: int | None = None) -> SignalSetSpec:
    kwargs = {} if spp is None else {"samples_per_symbol": spp}
    return SignalSetSpec(family=ChirpFamily(family), n_users=n, **kwargs)


def _report(num: int, ok: bool, detail: str) -> None:
    line = f"criterion {num:02d}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line)
    assert ok, line


# --- 1: synchronized sets are orthogonal --------------------------------------


def test_criterion_01_synchronized_orthogonality():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (10, 25, 50):
        r = xcorr_quadrature_matrix(_spec("linear", n), 0.0)
        np.fill_diagonal(r, 0.0)
        worst = max(worst, float(np.abs(r).max()))
    elapsed = time.perf_counter() - t0
    _report(
        1,
        worst <= 1e-9 and elapsed < 10.0,
        f"max |rho(0)| off-diagonal = {worst:.2e} (tol 1e-9), {elapsed:.1f}s (limit 10s)",
    )


# --- 2: linear-family closed form against quadrature ----------------------------


def test_criterion_02_closed_form_matches_quadrature():
    t0 = time.perf_counter()
    worst = 0.0
    for n in (10, 25):
        spec = _spec("linear", n)
        t_sym = spec.symbol_duration
        # 0.01..0.99 step 0.02 plus every degenerate offset j*T/N, where the
        # integrand loses its quadratic term and the closed form switches to
        # its limiting branch
        fracs = sorted(
            {round(0.01 + 0.02 * j, 10) for j in range(50)}
            | {round(j / n, 10) for j in range(1, n)}
        )
        for frac in fracs:
            eps = frac * t_sym
            reference = xcorr_quadrature_matrix(spec, eps)
            for m in range(n):
                for k in range(n):
                    closed = xcorr_linear_closed(n, t_sym, m, k, eps).value
                    worst = max(worst, abs(closed - reference[m, k]))
    elapsed = time.perf_counter() - t0
    _report(
        2,
        worst <= 1e-6 and elapsed < 120.0,
        f"max |closed - quadrature| = {worst:.2e} (tol 1e-6), {elapsed:.1f}s (limit 120s)",
    )


# --- 3: segment approximation converges -----------------------------------------


def test_criterion_03_segment_convergence():
    t0 = time.perf_counter()
    details = []
    ok = True
    for family in ("sinusoidal", "quartic"):
        spec = _spec(family, 15)
        eps = 0.2 * spec.symbol_duration
        reference = xcorr_quadrature(spec, 2, 5, eps).value
        coarse = abs(xcorr_segmented(spec, 2, 5, eps, segments=8).value - reference)
        fine = abs(xcorr_segmented(spec, 2, 5, eps, segments=2048).value - reference)
        ok = ok and fine <= 1e-3 and fine < coarse
        details.append(f"{family}: err(8)={coarse:.1e}, err(2048)={fine:.1e}")
    elapsed = time.perf_counter() - t0
    _report(3, ok and elapsed < 60.0, "; ".join(details) + f" (tol 1e-3), {elapsed:.1f}s")


# --- 4: mean-correlation symmetry and family ordering ----------------------------


def test_criterion_04_mean_correlation_symmetry_and_ordering():
    t0 = time.perf_counter()
    # half-period grid plus its mirror: mean |rho| over ordered pairs must be
    # symmetric about T/2 because reversing the delay swaps pair roles
    fracs = np.round(np.arange(0.02, 0.50, 0.02), 10)
    grid = np.concatenate([fracs, [0.5], 1.0 - fracs])
    max_asym = 0.0
    for family in ("linear", "sinusoidal", "quartic"):
        spec = _spec(family, 25)
        mean_abs = mean_xcorr_vs_delay(spec, grid * spec.symbol_duration, segments=1024).mean_abs
        lo = mean_abs[: fracs.size]
        hi = mean_abs[fracs.size + 1 :]
        max_asym = max(max_asym, float(np.abs(lo - hi).max()))

    small_fracs = np.round(np.arange(0.01, 0.105, 0.01), 10)
    violations = []
    for n in (10, 20):
        means = {}
        for family in ("linear", "quartic"):
            spec = _spec(family, n)
            means[family] = mean_xcorr_vs_delay(
                spec, small_fracs * spec.symbol_duration, segments=1024
            ).mean_abs
        for frac, lin, qua in zip(small_fracs, means["linear"], means["quartic"]):
            if not qua < lin:
                violations.append(f"N={n} eps={frac}T: quartic {qua:.4f} >= linear {lin:.4f}")
    elapsed = time.perf_counter() - t0
    _report(
        4,
        max_asym <= 2e-3 and not violations and elapsed < 300.0,
        f"max asymmetry about T/2 = {max_asym:.1e} (tol 2e-3); "
        f"quartic<linear violations on [0.01T,0.1T]: {violations or 'none'}; "
        f"{elapsed:.1f}s (limit 300s)",
    )


# --- 5: large correlations are rarer for the quartic family ----------------------


def test_criterion_05_histogram_tail_ordering():
    t0 = time.perf_counter()
    fracs = np.round(np.arange(0.02, 1.00, 0.02), 10)
    tails = {}
    for family in ("linear", "quartic"):
        spec = _spec(family, 20)
        # two bins split at 0.5: the upper count over the total is the tail mass
        stats = xcorr_histogram(spec, fracs * spec.symbol_duration, bins=2, segments=1024)
        tails[family] = float(stats.counts[1]) / float(stats.counts.sum())
    elapsed = time.perf_counter() - t0
    _report(
        5,
        tails["quartic"] < tails["linear"],
        f"P(|rho|>0.5) over full delay grid: quartic {tails['quartic']:.4f} "
        f"< linear {tails['linear']:.4f}; {elapsed:.1f}s",
    )


# --- 6: orthogonal interferers reduce the error rate to the FSK result -----------


def test_criterion_06_fsk_reduction():
    spec = _spec("linear", 5)
    profile = InterferenceProfile(
        victim=0, interferers=tuple(Interferer(user=u, delay=0.0) for u in range(1, 5))
    )
    worst = 0.0
    for esn0_db in np.linspace(0.0, 9.5, 20):
        esn0 = 10.0 ** (esn0_db / 10.0)
        got = ber_exact(profile.at_esn0(esn0), spec).probability
        worst = max(worst, abs(got - q_function(math.sqrt(esn0))))
    _report(6, worst <= 1e-12, f"max |ber - Q(sqrt(Es/N0))| = {worst:.2e} (tol 1e-12)")


# --- 7: pattern enumeration against the direct two- and three-user forms ---------


def _n2_reference(rho: float, esn0: float, ratio: float) -> float:
    a = math.sqrt(ratio) * rho
    root = math.sqrt(esn0)
    return 0.5 * (q_function((1.0 + a) * root) + q_function((1.0 - a) * root))


def _n3_reference(rho1, rho2, esn0, ratio1, ratio2) -> float:
    a1 = math.sqrt(ratio1) * rho1
    a2 = math.sqrt(ratio2) * rho2
    root = math.sqrt(esn0)
    return 0.25 * sum(
        q_function((1.0 + s1 * a1 + s2 * a2) * root)
        for s1 in (1.0, -1.0)
        for s2 in (1.0, -1.0)
    )


def test_criterion_07_small_set_reference_forms():
    rng = np.random.default_rng(74)
    worst = 0.0
    spec2 = _spec("linear", 2)
    for _ in range(25):
        eps = float(rng.uniform(0.0, 1.0))
        esn0 = float(rng.uniform(0.5, 16.0))
        ratio = float(rng.uniform(0.25, 4.0))
        rho = xcorr_linear_closed(2, 1.0, 0, 1, eps).value.real
        got = ber_exact(
            InterferenceProfile(
                victim=0, interferers=(Interferer(user=1, delay=eps, energy=ratio),)
            ).at_esn0(esn0),
            spec2,
        ).probability
        worst = max(worst, abs(got - _n2_reference(rho, esn0, ratio)))
    spec3 = _spec("linear", 3)
    for _ in range(25):
        eps1, eps2 = (float(rng.uniform(0.0, 1.0)) for _ in range(2))
        esn0 = float(rng.uniform(0.5, 16.0))
        r1, r2 = (float(rng.uniform(0.25, 4.0)) for _ in range(2))
        rho1 = xcorr_linear_closed(3, 1.0, 0, 1, eps1).value.real
        rho2 = xcorr_linear_closed(3, 1.0, 0, 2, eps2).value.real
        got = ber_exact(
            InterferenceProfile(
                victim=0,
                interferers=(
                    Interferer(user=1, delay=eps1, energy=r1),
                    Interferer(user=2, delay=eps2, energy=r2),
                ),
            ).at_esn0(esn0),
            spec3,
        ).probability
        worst = max(worst, abs(got - _n3_reference(rho1, rho2, esn0, r1, r2)))
    _report(7, worst <= 1e-14, f"max |enumerated - direct form| = {worst:.2e} (tol 1e-14)")


# --- 8: simulation agrees with the analytic error rate ---------------------------


def _exact_aggregate(spec, delays, energies, esn0) -> float:
    """Mean analytic BER over victims, each seeing the others' relative
    delays (cyclic) and energy ratios at its own operating point."""
    t_sym = spec.symbol_duration
    total = 0.0
    for j in range(spec.n_users):
        profile = InterferenceProfile(
            victim=j,
            interferers=tuple(
                Interferer(user=i, delay=(delays[i] - delays[j]) % t_sym, energy=energies[i])
                for i in range(spec.n_users)
                if i != j
            ),
            victim_energy=energies[j],
        )
        total += ber_exact(profile.at_esn0(esn0 * energies[j] / energies[0]), spec).probability
    return total / spec.n_users


def test_criterion_08_simulation_matches_analysis():
    t0 = time.perf_counter()
    esn0_db = (0.0, 3.0, 6.0, 9.0, 12.0)
    worst_z = 0.0
    checked = 0
    cfg_idx = 0
    for n in (2, 4):
        # 60 samples per sub-band keeps the tested offsets grid-exact and the
        # delay-quantization bias on rho far below Monte Carlo resolution
        spec = _spec("linear", n, spp=60 * n)
        t_sym = spec.symbol_duration
        for eps_frac in (0.05, 0.1, 0.3):
            delays = (0.0,) + (eps_frac * t_sym,) * (n - 1)
            for energies in ((1.0,) * n, (2.0,) + (1.0,) * (n - 1)):
                cfg_idx += 1
                config = LinkConfig(
                    spec=spec,
                    esn0_db=esn0_db,
                    delay_model=FixedDelays(delays),
                    energies=energies,
                    bits_per_point=-(-1_000_000 // n),
                    target_errors=None,
                    block_symbols=256,
                    seed=1000 + cfg_idx,
                )
                result = run_link_sim(config)
                assert not any(result.stopped_early)
                for p_idx, point in enumerate(result.aggregate.points):
                    exact = _exact_aggregate(spec, delays, energies, point.esn0)
                    if exact < 1e-4:
                        continue
                    n_bits = int(result.bits[p_idx].sum())
                    assert n_bits >= 1_000_000
                    z = (point.probability - exact) / math.sqrt(exact * (1.0 - exact) / n_bits)
                    worst_z = max(worst_z, abs(z))
                    checked += 1
    elapsed = time.perf_counter() - t0
    _report(
        8,
        worst_z <= 3.0 and elapsed < 900.0,
        f"worst |z| = {worst_z:.2f} over {checked} points (limit 3 binomial SE, "
        f">=1e6 bits each), {elapsed:.0f}s (limit 900s)",
    )


# --- 9: quartic family wins under quasi-synchronous delays -----------------------


def _sim_point(family, n, sigma_frac, bits, seed, k=None, spp=None):
    spec = _spec(family, n, spp=spp)
    config = LinkConfig(
        spec=spec,
        esn0_db=(12.0,),
        n_active=k,
        delay_model=GaussianDelays(sigma_frac * spec.symbol_duration),
        bits_per_point=bits,
        target_errors=None,
        block_symbols=128,
        seed=seed,
    )
    return run_link_sim(config).aggregate.points[0]


def test_criterion_09_family_ordering_under_delay_spread():
    t0 = time.perf_counter()
    details = []
    ok = True
    # moderate delay spread: quartic beats linear with disjoint intervals
    for n, seed_lin, seed_qua in ((10, 911, 912), (20, 913, 914)):
        lin = _sim_point("linear", n, 0.1, 50_000, seed_lin)
        qua = _sim_point("quartic", n, 0.1, 50_000, seed_qua)
        disjoint = (
            qua.probability + qua.confidence_halfwidth
            < lin.probability - lin.confidence_halfwidth
        )
        ok = ok and disjoint
        details.append(
            f"sigma=0.1T N={n}: quartic {qua.probability:.2e}±{qua.confidence_halfwidth:.0e} "
            f"< linear {lin.probability:.2e}±{lin.confidence_halfwidth:.0e}"
        )
    # small delay spread: degradation relative to the synchronized curve
    # (orthogonal sets, so exactly Q(sqrt(Es/N0)) for every family)
    sync = q_function(math.sqrt(10.0**1.2))
    for n, bits, seed in ((20, 50_000, 902), (50, 30_000, 902)):
        lin = _sim_point("linear", n, 0.01, bits, seed, spp=64 * n)
        qua = _sim_point("quartic", n, 0.01, bits, seed, spp=64 * n)
        ok = ok and qua.probability / sync < lin.probability / sync
        details.append(
            f"sigma=0.01T N={n}: degradation quartic {qua.probability / sync:.0f}x "
            f"< linear {lin.probability / sync:.0f}x"
        )
    elapsed = time.perf_counter() - t0
    _report(9, ok, "; ".join(details) + f"; {elapsed:.0f}s")


# --- 10: the quartic advantage grows under partial loading -----------------------


def test_criterion_10_partial_loading_widens_gap():
    t0 = time.perf_counter()
    log_gap = {}
    for k, bits, seed_lin, seed_qua in ((10, 40_000, 1031, 1032), (40, 12_000, 1033, 1034)):
        lin = _sim_point("linear", 40, 0.1, bits, seed_lin, k=k)
        qua = _sim_point("quartic", 40, 0.1, bits, seed_qua, k=k)
        # BER gap on the usual log scale: log10(linear/quartic); interval
        # halfwidth by the delta method from the binomial halfwidths
        center = math.log10(lin.probability / qua.probability)
        halfwidth = math.sqrt(
            (lin.confidence_halfwidth / lin.probability) ** 2
            + (qua.confidence_halfwidth / qua.probability) ** 2
        ) / math.log(10.0)
        log_gap[k] = (center, halfwidth)
    disjoint = log_gap[10][0] - log_gap[10][1] > log_gap[40][0] + log_gap[40][1]
    elapsed = time.perf_counter() - t0
    _report(
        10,
        disjoint,
        f"log10 BER gap at K=10: {log_gap[10][0]:.2f}±{log_gap[10][1]:.2f} > "
        f"at K=40: {log_gap[40][0]:.2f}±{log_gap[40][1]:.2f}; {elapsed:.0f}s",
    )


# --- 11: special-function kernels against independent oracles --------------------


def _erfi_series(x: float) -> float:
    total, term, k = 0.0, x, 0
    while abs(term) > 1e-18 * max(abs(total), 1.0):
        total += term / (2 * k + 1)
        k += 1
        term *= x * x / k
    return 2.0 / math.sqrt(math.pi) * total


def test_criterion_11_special_function_oracles():
    t0 = time.perf_counter()
    rng = np.random.default_rng(47)
    worst = 0.0
    for _ in range(1000):
        curvature = float(rng.choice((-1.0, 1.0)) * rng.uniform(1.0, 200.0))
        slope = float(rng.uniform(-50.0, 50.0))
        lower = float(rng.uniform(-0.5, 0.5))
        width = float(rng.uniform(0.01, 1.0))
        got = quad_phase_integral(QuadPhaseIntegral(curvature, slope, lower, lower + width))

        def phase(t: float) -> float:
            return 2.0 * math.pi * (0.5 * curvature * t * t + slope * t)

        re, _ = quad(
            lambda t: math.cos(phase(t)),
            lower, lower + width, limit=800, epsabs=1e-12, epsrel=1e-12,
        )
        im, _ = quad(
            lambda t: math.sin(phase(t)),
            lower, lower + width, limit=800, epsabs=1e-12, epsrel=1e-12,
        )
        worst = max(worst, abs(got - complex(re, im)))
    anchor = 1.650425758797543
    erfi_err = abs(erfi(1.0) - anchor)
    series_err = abs(_erfi_series(1.0) - anchor)
    elapsed = time.perf_counter() - t0
    _report(
        11,
        worst <= 1e-8 and erfi_err <= 1e-10 and series_err <= 1e-10,
        f"max |integral - adaptive quadrature| = {worst:.2e} over 1000 draws (tol 1e-8); "
        f"|erfi(1) - anchor| = {erfi_err:.1e}, series oracle {series_err:.1e} (tol 1e-10); "
        f"{elapsed:.0f}s",
    )
