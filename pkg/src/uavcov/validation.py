"""Reduced-scale cross-validation suite behind the `validate` subcommand.

Each check pits one evaluation route against an independent one: exact
anchors, closed forms against adaptive quadrature, inverse-transform samples
against closed-form laws, derivative jets against finite differences, and
the analysis against the end-to-end simulation.  Scales are chosen so a full
run stays well under a minute while keeping each comparison far away from
its statistical noise floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from . import interference
from .config import derive_stay_probability
from .coverage import CoverageQuery, coverage_probability
from .distributions import AltitudeDistribution, DistanceDistribution
from .scenario import Scenario
from .simulator import run_campaign, split_by_phase
from .special import hyp2f1

__all__ = ["CheckResult", "run_validation"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check_trivial_anchors(sc: Scenario) -> CheckResult:
    net, fading = sc.network, sc.fading
    p_stay = derive_stay_probability(sc.mobility, net)
    failures = []
    if interference.laplace_transform(0.0, net, fading, p_stay) != 1.0:
        failures.append("L_I(0) != 1")
    if hyp2f1(0, 1.5, 2.5, -3.0) != 1.0 or hyp2f1(2, 1.5, 2.5, 0.0) != 1.0:
        failures.append("2F1 anchor != 1")
    for phase in ("static", "moving"):
        dist = DistanceDistribution(phase, net.radius, net.height)
        if dist.cdf(0.0) != 0.0 or dist.cdf(dist.support_max) != 1.0:
            failures.append(f"{phase} cdf endpoints")
    m0_net = net.__class__(net.radius, net.height, net.serving_altitude, 0,
                           net.path_loss_exponent)
    if coverage_probability(CoverageQuery(1.0, m0_net, fading, p_stay)) != 1.0:
        failures.append("coverage(M=0) != 1")
    detail = "; ".join(failures) if failures else "all exact anchors hold"
    return CheckResult("trivial-anchors", not failures, detail)


def _check_hyp2f1_consistency(sc: Scenario) -> CheckResult:
    # Gauss contiguous relation as an internal consistency check, plus the
    # direct-series/Pfaff overlap agreement.
    worst = 0.0
    for a in (1, 2, 3):
        for b in (1.0, 1.5, 2.0, 2.5):
            c = b + 1.0
            for z in (-0.1, -0.45, -2.0, -10.0, -40.0):
                f = hyp2f1(a, b, c, z)
                f_down = hyp2f1(a - 1, b, c, z)
                f_up = hyp2f1(a, b, c + 1.0, z)
                resid = c * (1 - z) * f - c * f_down + (c - b) * z * f_up
                scale = max(abs(c * (1 - z) * f), abs(c * f_down), abs((c - b) * z * f_up))
                worst = max(worst, abs(resid) / scale)
    from .special import _gauss_series  # overlap: both series paths in-range

    overlap_worst = 0.0
    for a in (1, 2, 4):
        for b in (1.0, 2.5):
            for z in np.linspace(-0.95, -0.5, 7):
                direct = _gauss_series(a, b, b + 1.0, float(z))
                pfaff = (1.0 - z) ** (-a) * _gauss_series(a, 1.0, b + 1.0, z / (z - 1.0))
                overlap_worst = max(overlap_worst, abs(direct - pfaff) / abs(direct))
    ok = worst <= 1e-9 and overlap_worst <= 1e-11
    return CheckResult(
        "hyp2f1-consistency",
        ok,
        f"contiguous residual {worst:.2e} (<=1e-9), overlap {overlap_worst:.2e} (<=1e-11)",
    )


def _check_distributions(sc: Scenario, rng: np.random.Generator) -> CheckResult:
    net = sc.network
    n = 100_000
    worst_ks = 0.0
    for phase in ("static", "moving"):
        dist = DistanceDistribution(phase, net.radius, net.height)
        ks = stats.kstest(dist.sample(n, rng), dist.cdf).statistic
        worst_ks = max(worst_ks, ks)
        grid = np.linspace(0, dist.support_max, 21)[1:]
        for w in grid:
            quad, _ = integrate.quad(
                dist.pdf, 0, w, points=[x for x in (net.height, net.radius) if x < w],
                limit=200,
            )
            if abs(quad - dist.cdf(w)) > 1e-9:
                return CheckResult(
                    "distribution-laws", False,
                    f"{phase} pdf/cdf mismatch {abs(quad - dist.cdf(w)):.2e} at w={w:.2f}",
                )
    alt = AltitudeDistribution("moving", net.height)
    draws = alt.sample(n, rng)
    se = draws.std() / math.sqrt(n)
    mean_ok = abs(draws.mean() - net.height / 2) < 3 * se
    ok = worst_ks < 0.006 and mean_ok
    return CheckResult(
        "distribution-laws",
        ok,
        f"KS {worst_ks:.4f} (<0.006), moving-altitude mean "
        f"{draws.mean():.3f} vs {net.height / 2:.3f} (3SE={3 * se:.3f})",
    )


def _check_closed_vs_quadrature(sc: Scenario) -> CheckResult:
    net = sc.network
    if net.path_loss_exponent != 2.0:
        return CheckResult(
            "closed-vs-quadrature", True,
            "skipped: no closed form for this path-loss exponent",
        )
    worst = 0.0
    shapes = sorted({1, sc.fading.interferer_m, 3})
    for phase in ("static", "moving"):
        for m in shapes:
            for s in np.logspace(-2, 6, 15):
                closed = interference.phase_laplace_factor(phase, float(s), m, net, "closed")
                quad = interference.phase_laplace_factor(phase, float(s), m, net, "quadrature")
                worst = max(worst, abs(closed - quad) / quad)
    return CheckResult(
        "closed-vs-quadrature", worst <= 1e-8, f"worst relative gap {worst:.2e} (<=1e-8)"
    )


def _check_binomial_collapse(sc: Scenario, rng: np.random.Generator) -> CheckResult:
    net, fading = sc.network, sc.fading
    worst = 0.0
    for M in range(1, 7):
        trial_net = net.__class__(net.radius, net.height, net.serving_altitude, M,
                                  net.path_loss_exponent)
        for _ in range(4):
            s = float(10 ** rng.uniform(-1, 4))
            p = float(rng.uniform(0, 1))
            power = interference.laplace_transform(s, trial_net, fading, p)
            summed = interference.laplace_transform_phase_sum(s, trial_net, fading, p)
            worst = max(worst, abs(power - summed) / power)
    return CheckResult(
        "binomial-collapse", worst <= 1e-13, f"worst relative gap {worst:.2e} (<=1e-13)"
    )


def _check_derivative_jet(sc: Scenario) -> CheckResult:
    net, fading = sc.network, sc.fading
    p_stay = derive_stay_probability(sc.mobility, net)
    psi_mid = sc.psi_grid_linear()[len(sc.psi_grid_db) // 2]
    s0 = max(fading.serving_m * psi_mid * net.serving_altitude**net.path_loss_exponent, 1.0)
    jet = interference.laplace_derivative_jet(s0, 2, net, fading, p_stay)

    def L(s):
        return interference.laplace_transform(s, net, fading, p_stay)

    h1 = 1e-5 * s0
    fd1 = (L(s0 + h1) - L(s0 - h1)) / (2 * h1)
    h2 = 3e-4 * s0
    fd2 = (L(s0 + h2) - 2 * L(s0) + L(s0 - h2)) / h2**2
    r1 = abs(jet.derivative(1) - fd1) / abs(fd1)
    r2 = abs(jet.derivative(2) - fd2) / abs(fd2)
    ok = r1 <= 1e-5 and r2 <= 1e-5
    return CheckResult(
        "derivative-jet", ok, f"k=1 rel {r1:.2e}, k=2 rel {r2:.2e} (<=1e-5)"
    )


def _check_analysis_vs_simulation(sc: Scenario) -> CheckResult:
    net, fading, mob = sc.network, sc.fading, sc.mobility
    if fading.altitude_dependent:
        return CheckResult(
            "analysis-vs-simulation", True,
            "skipped: altitude-dependent fading is simulation-only",
        ), None
    psi = np.asarray(sc.psi_grid_linear())
    n_snap = min(sc.sim.n_snapshots, 200_000)
    result = run_campaign(
        net, fading, mob, n_snap,
        warmup_steps=min(sc.sim.warmup_steps, 4000),
        dt=sc.sim.dt, seed=sc.sim.seed, psi_grid=psi, stride=sc.sim.stride,
        replications=sc.sim.replications, chains=sc.sim.chains,
        boundary_rule=sc.sim.boundary_rule,
    )
    analytical = np.array([
        coverage_probability(CoverageQuery(float(p), net, fading, result.stay_probability))
        for p in psi
    ])
    gap = np.abs(result.coverage() - analytical)
    tol = np.maximum(0.015, 5 * np.nan_to_num(result.coverage_se(), nan=0.0))
    worst = float((gap - tol).max())
    idx = int((gap - tol).argmax())
    return CheckResult(
        "analysis-vs-simulation",
        bool((gap <= tol).all()),
        f"worst margin {worst:+.4f} at {sc.psi_grid_db[idx]:g} dB "
        f"(gap {gap[idx]:.4f}, tol {tol[idx]:.4f}, {result.n_snapshots} snapshots)",
    ), result


def _check_steady_state(sc: Scenario, result) -> CheckResult:
    if result is None or result.n_interferers == 0:
        return CheckResult("steady-state-mobility", True, "skipped: no interferers simulated")
    p_stay = result.stay_probability
    frac = result.dwelling_fraction()
    se = result.dwelling_fraction_se()
    frac_tol = max(4 * se, 0.01)
    frac_ok = abs(frac - p_stay) <= frac_tol
    pmf = split_by_phase(result).dwelling_count_pmf()
    ref = stats.binom.pmf(np.arange(result.n_interferers + 1), result.n_interferers, p_stay)
    tv = 0.5 * float(np.abs(pmf - ref).sum())
    hop_gap = abs(result.mean_interior_hop_length() - sc.mobility.mean_hop_length)
    ok = frac_ok and tv < 0.02 and hop_gap < 0.05 * sc.mobility.mean_hop_length
    return CheckResult(
        "steady-state-mobility",
        ok,
        f"dwelling {frac:.4f} vs {p_stay:.4f} (tol {frac_tol:.4f}), "
        f"phase-count TV {tv:.4f} (<0.02), hop mean gap {hop_gap:.3f}",
    )


def run_validation(sc: Scenario, fault_bias: float = 0.0) -> list[CheckResult]:
    """Run every check; `fault_bias` perturbs the closed forms to prove teeth."""
    rng = np.random.default_rng(sc.sim.seed)
    interference.set_fault_bias(fault_bias)
    try:
        results = [
            _check_trivial_anchors(sc),
            _check_hyp2f1_consistency(sc),
            _check_distributions(sc, rng),
            _check_closed_vs_quadrature(sc),
            _check_binomial_collapse(sc, rng),
            _check_derivative_jet(sc),
        ]
        sim_check, campaign = _check_analysis_vs_simulation(sc)
        results.append(sim_check)
        results.append(_check_steady_state(sc, campaign))
    finally:
        interference.set_fault_bias(0.0)
    return results
