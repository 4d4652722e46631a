"""Reliability curves, k-out-of-n redundancy, degradation and MTTF quadrature.

Components fail independently with exponential lifetimes. Curves are
immutable callables that accept scalars or numpy arrays of times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .config import ChipletDesign, PackageDesign, SimSettings
from .faultsim import chiplet_layout, package_layout

LOG_SPACE_ABOVE = 50


class NonDecayingCurveError(ValueError):
    """The curve never fell below the quadrature tail cut."""


@dataclass(frozen=True)
class ReliabilityCurve:
    fn: Callable[[np.ndarray], np.ndarray]
    label: str = ""

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        out = self.fn(arr)
        return float(out) if arr.ndim == 0 else out


def _survival(rate, t):
    return np.exp(-rate * t)


def _failure(rate, t):
    return -np.expm1(-rate * t)


def exp_reliability(rate: float) -> ReliabilityCurve:
    if not rate > 0:
        raise ValueError(f"failure rate must be > 0, got {rate}")
    return ReliabilityCurve(lambda t: _survival(rate, t), f"exp({rate:g})")


def series(curves: Sequence[ReliabilityCurve]) -> ReliabilityCurve:
    """System that needs every member: pointwise product."""
    curves = tuple(curves)
    if not curves:
        raise ValueError("series needs at least one curve")
    if len(curves) == 1:
        return curves[0]

    def fn(t):
        out = np.ones_like(t)
        for c in curves:
            out = out * c.fn(t)
        return out

    return ReliabilityCurve(fn, "series(" + ", ".join(c.label for c in curves) + ")")


def _binomial_terms(n: int, ks, rate: float, t):
    """``C(n,k) F^k R^(n-k)`` for each ``k`` in ``ks``; shape ``(len(ks),) + t.shape``."""
    ks = np.asarray(ks)
    t = np.asarray(t, dtype=float)
    shape = (len(ks),) + (1,) * t.ndim
    kcol = ks.reshape(shape)
    if n <= LOG_SPACE_ABOVE:
        coef = np.array([math.comb(n, int(k)) for k in ks], dtype=float).reshape(shape)
        return coef * _failure(rate, t) ** kcol * _survival(rate, t) ** (n - kcol)
    log_coef = np.array([math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
                         for k in ks]).reshape(shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_f = np.log(_failure(rate, t))
        log_r = -rate * t
        logs = log_coef + np.where(kcol == 0, 0.0, kcol * log_f) + (n - kcol) * log_r
    return np.exp(logs)


def _at_most(n: int, kmax: int, rate: float, t):
    """P(at most ``kmax`` of ``n`` exponential units have failed by ``t``)."""
    kmax = min(kmax, n)
    return _binomial_terms(n, np.arange(kmax + 1), rate, t).sum(axis=0)


def k_of_n_reliability(required_N: int, spares_a: int, unit_rate: float) -> ReliabilityCurve:
    """``required_N`` of ``required_N + spares_a`` identical units must survive."""
    if required_N < 1 or spares_a < 0:
        raise ValueError("need required_N >= 1 and spares_a >= 0")
    if not unit_rate > 0:
        raise ValueError(f"failure rate must be > 0, got {unit_rate}")
    n = required_N + spares_a
    return ReliabilityCurve(lambda t: _at_most(n, spares_a, unit_rate, t),
                            f"{required_N}-of-{n}({unit_rate:g})")


def degraded_reliability(N: int, Kmax: int, unit_rate: float) -> ReliabilityCurve:
    """Probability that no more than ``Kmax`` of ``N`` units have failed."""
    if not 0 <= Kmax <= N:
        raise ValueError(f"need 0 <= Kmax <= N, got Kmax={Kmax}, N={N}")
    if Kmax == N:
        return ReliabilityCurve(lambda t: np.ones_like(t), "one")
    return ReliabilityCurve(lambda t: _at_most(N, Kmax, unit_rate, t), f"deg({N},{Kmax})")


def degraded_throughput_factor(N: int, unit_rate: float, Kmax: int | None = None,
                               conditional: bool = False) -> ReliabilityCurve:
    """Expected fraction of the ``N`` units still working at time ``t``.

    The default sums over every failure count and therefore equals the single
    unit survival ``exp(-rate*t)``. With ``conditional=True`` the expectation
    is taken over states with at most ``Kmax`` failures only.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    top = N if not conditional else Kmax
    if top is None:
        raise ValueError("conditional throughput needs Kmax")
    ks = np.arange(min(top, N) + 1)

    def fn(t):
        terms = _binomial_terms(N, ks, unit_rate, t)
        w = ((N - ks) / N).reshape((-1,) + (1,) * np.ndim(t))
        num = (w * terms).sum(axis=0)
        if not conditional:
            return num
        den = terms.sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(den > 0, num / den, 0.0)

    return ReliabilityCurve(fn, f"eta({N})")


def degraded_capacity_curve(N: int, Kmax: int, unit_rate: float,
                            eta_mode: str = "unconditional", spares: int = 0) -> ReliabilityCurve:
    """Integrand ``eta(t) * R_deg(t)`` of the degradation-aware lifetime.

    ``N`` units deliver compute and ``spares`` idle units replace the first
    failures; the system stops once more than ``spares + Kmax`` units are
    gone. ``unconditional`` multiplies the survival of that region by the
    expected working fraction of all ``N + spares`` units. ``conditional``
    takes one joint expectation over the surviving region, with throughput
    ``min(working, N) / N``; it never falls below the fail-fast curve.
    """
    if N < 1 or spares < 0:
        raise ValueError("need N >= 1 and spares >= 0")
    n = N + spares
    tolerated = min(n, spares + Kmax)
    if not 0 <= Kmax <= N:
        raise ValueError(f"need 0 <= Kmax <= N, got Kmax={Kmax}, N={N}")
    if eta_mode == "unconditional":
        r_deg = degraded_reliability(n, tolerated, unit_rate)
        eta = degraded_throughput_factor(n, unit_rate)
        return ReliabilityCurve(lambda t: eta.fn(t) * r_deg.fn(t), f"cap({N}+{spares},{Kmax})")
    if eta_mode != "conditional":
        raise ValueError(f"unknown eta_mode {eta_mode!r}")
    ks = np.arange(tolerated + 1)
    weights = np.minimum(n - ks, N) / N

    def fn(t):
        terms = _binomial_terms(n, ks, unit_rate, t)
        return (weights.reshape((-1,) + (1,) * np.ndim(t)) * terms).sum(axis=0)

    return ReliabilityCurve(fn, f"capc({N}+{spares},{Kmax})")


# -- quadrature -------------------------------------------------------------

_MAX_DOUBLINGS = 400
_MAX_INTERVALS = 1 << 20


def _tail_horizon(f, cut):
    T = 1.0
    if f(np.array(T)) < cut:
        while T > 1e-300 and f(np.array(T / 2)) < cut:
            T /= 2
        return T
    for _ in range(_MAX_DOUBLINGS):
        T *= 2
        if f(np.array(T)) < cut:
            return T
    raise NonDecayingCurveError(f"curve stays above {cut:g} beyond t={T:g}")


def integrate(f, upper: float, rel_tol: float) -> float:
    """Globally adaptive Simpson rule for a smooth integrand on ``[0, upper]``."""
    a = np.linspace(0.0, upper, 65)[:-1]
    b = a + upper / 64
    total = 0.0
    estimate = None
    while a.size:
        m = 0.5 * (a + b)
        h = b - a
        fa, fm, fb = f(a), f(m), f(b)
        fl, fr = f(0.5 * (a + m)), f(0.5 * (m + b))
        whole = h / 6 * (fa + 4 * fm + fb)
        halves = h / 12 * (fa + 4 * fl + 2 * fm + 4 * fr + fb)
        err = np.abs(halves - whole) / 15
        if estimate is None:
            estimate = abs(halves.sum()) or 1.0
        ok = err <= rel_tol * estimate * h / upper
        if a.size > _MAX_INTERVALS:
            ok[:] = True
        total += float((halves[ok] + (halves[ok] - whole[ok]) / 15).sum())
        a, m, b = a[~ok], m[~ok], b[~ok]
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
    return total


def mttf(curve: ReliabilityCurve, settings: SimSettings | None = None) -> float:
    """Area under the curve, truncated where it drops below the tail cut."""
    settings = settings or SimSettings()
    upper = _tail_horizon(curve.fn, settings.quadrature_tail_cut)
    return integrate(curve.fn, upper, settings.quadrature_rel_tol)


def mttf_degraded(N: int, Kmax: int, unit_rate: float, settings: SimSettings | None = None,
                  eta_mode: str = "unconditional") -> float:
    return mttf(degraded_capacity_curve(N, Kmax, unit_rate, eta_mode), settings)


# -- compositions -----------------------------------------------------------

def router_curve(design: ChipletDesign) -> ReliabilityCurve:
    """Series of rows; a row with a spare survives one router failure."""
    layout = chiplet_layout(design)
    rate = design.module.router_fail_rate
    rows = []
    for width in layout.row_widths:
        if design.router_redundancy_enabled:
            rows.append(k_of_n_reliability(width, 1, rate))
        else:
            rows.append(exp_reliability(width * rate))
    return series(rows)


def chiplet_link_count(design: ChipletDesign) -> float:
    """Mesh links plus the per-redundant-module routing overhead."""
    return (chiplet_layout(design).n_links
            + design.noc_links_per_redundant_module * design.redundant_modules_a)


def chiplet_reliability(design: ChipletDesign, settings: SimSettings | None = None) -> ReliabilityCurve:
    """Cores (k-of-n over placed modules) x router rows x links."""
    placed = design.placed_modules
    spares = placed - design.required_cores
    core_rate = design.module.core_fail_rate
    if settings is not None and settings.degradation_enabled and settings.degradation_scope in ("module", "both"):
        kmax = min(design.required_cores, settings.degradation_Kmax)
        cores = degraded_capacity_curve(design.required_cores, kmax, core_rate, settings.eta_mode, spares)
    else:
        cores = k_of_n_reliability(design.required_cores, spares, core_rate)
    parts = [cores, router_curve(design)]
    n_links = chiplet_link_count(design)
    if n_links > 0:
        parts.append(exp_reliability(n_links * design.link_fail_rate))
    return series(parts)


def interposer_curve(pkg: PackageDesign) -> ReliabilityCurve:
    layout = package_layout(pkg)
    rate = layout.n_units * pkg.interposer_module_fail_rate + layout.n_links * pkg.interposer_link_fail_rate
    return exp_reliability(rate)


def arch_reliability(pkg: PackageDesign, chiplet_mttf: float,
                     settings: SimSettings | None = None) -> ReliabilityCurve:
    """Chiplets as exponential units (rate 1/MTTF) in k-of-n, times the interposer."""
    if not chiplet_mttf > 0:
        raise ValueError(f"chiplet MTTF must be > 0, got {chiplet_mttf}")
    rate = 1.0 / chiplet_mttf
    bonded = pkg.bonded_chiplets
    spares = bonded - pkg.threshold
    if settings is not None and settings.degradation_enabled and settings.degradation_scope in ("package", "both"):
        kmax = min(pkg.threshold, settings.degradation_Kmax)
        chiplets = degraded_capacity_curve(pkg.threshold, kmax, rate, settings.eta_mode, spares)
    else:
        chiplets = k_of_n_reliability(pkg.threshold, spares, rate)
    return series([chiplets, interposer_curve(pkg)])
