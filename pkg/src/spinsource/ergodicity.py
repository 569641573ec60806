"""Finite-horizon numerical tests for ergodic averaging and mixing.

For m-site observables a, b and a stationary source, write

    corr(i) = tr(rho_{m+i} (a (x) I^(x (i-m)) (x) b)),    i >= m,
    target  = tr(rho_m a) tr(rho_m b).

Three convergence statements are probed over a finite horizon of n_max
shifts:

* ergodic mean:   (1/n) sum_i corr(i)            -> target,
* weak mixing:    (1/n) sum_i |corr(i) - target| -> 0,
* strong mixing:  corr(i)                        -> target.

Each test returns the full statistic sequence, its deviation sequence,
and a three-way verdict (pass, fail, inconclusive).  A finite horizon
cannot prove a limit, so the verdict is a trend heuristic: pass needs
the final deviation under tolerance with a non-growing tail, fail needs
a final deviation over tolerance that shows no clear improvement, and
everything in between stays inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import Operator, random_observable, word_projector
from .sources import (
    ClassicallyCorrelatedSource,
    IIDSource,
    _peel_transforms,
    source_block_mean,
    source_correlation,
)

DEFAULT_N_MAX = 2000
TRANSFER_TOL = 1e-2
DENSE_TOL = 5e-2
DECAY_FLOOR = 1e-13
_ORDER = {"fail": 0, "inconclusive": 1, "pass": 2}


def _verdict(devs: np.ndarray, tol: float) -> str:
    """Trend heuristic over a deviation sequence.

    pass: final value within tol and the trailing tenth of the sequence
    not increasing (max of its second half at most max of its first half,
    with absolute slack 1e-12).  fail: final value above tol and the
    second half of the whole sequence not decisively below the first
    (factor 2).  Otherwise inconclusive.
    """
    devs = np.asarray(devs, dtype=float)
    n = devs.size
    if n < 4:
        raise ValueError(f"need at least 4 points for a verdict, got {n}")
    final = float(devs[-1])
    if final <= tol:
        w = max(4, n // 10)
        tail = devs[-w:]
        first = float(tail[: w // 2].max())
        second = float(tail[w // 2 :].max())
        return "pass" if second <= first + 1e-12 else "inconclusive"
    first = float(devs[: n // 2].max())
    second = float(devs[n // 2 :].max())
    return "inconclusive" if second <= 0.5 * first else "fail"


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit of log deviation against shift index.

    rate is the per-shift multiplicative factor exp(slope).  Points at or
    below the noise floor are excluded; the fit is reported only when
    enough points survive.
    """

    rate: float
    log_intercept: float
    points_used: int
    max_log_residual: float


def fit_decay(devs, floor: float = DECAY_FLOOR, min_points: int = 8) -> DecayFit | None:
    devs = np.asarray(devs, dtype=float)
    idx = np.where(devs > floor)[0]
    if idx.size < min_points:
        return None
    x = idx.astype(float)
    y = np.log(devs[idx])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.max(np.abs(y - (slope * x + intercept))))
    return DecayFit(float(np.exp(slope)), float(intercept), int(idx.size), resid)


@dataclass(frozen=True, eq=False)
class ErgodicityReport:
    """Outcome of one convergence test for one observable pair.

    statistics holds the judged sequence (partial means for the averaged
    tests, raw correlations for strong mixing); deviations holds its
    distance from the limit at each horizon.
    """

    test: str
    n_max: int
    target: complex
    shifts: np.ndarray
    statistics: np.ndarray
    deviations: np.ndarray
    final_deviation: float
    tol: float
    verdict: str
    decay: DecayFit | None = None
    step: int = 1

    def __post_init__(self):
        for name in ("shifts", "statistics", "deviations"):
            arr = np.array(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def correlation_sequence(
    source, a: Operator, b: Operator, n_max: int, backend: str = "auto", step: int = 1
) -> tuple:
    """(shifts, corr) over shifts i = a.sites .. n_max (multiples of step).

    For step 1 that is n_max - m + 1 correlation values, one per shift of
    the second observable past the first.
    """
    if step < 1:
        raise ValueError(f"step must be >= 1, got {step}")
    m = a.sites
    shifts = np.array([i for i in range(m, n_max + 1) if i % step == 0])
    if shifts.size < 4:
        raise ValueError(
            f"horizon n_max={n_max} leaves {shifts.size} usable shifts, need >= 4"
        )
    corr = source_correlation(source, a, b, shifts - m, backend)
    return shifts, corr


def _pair_target(source, a: Operator, b: Operator) -> complex:
    return complex(source_block_mean(source, a) * source_block_mean(source, b))


def _ergodic_from_sequence(n_max, target, shifts, corr, tol, step) -> ErgodicityReport:
    means = np.cumsum(corr) / np.arange(1, shifts.size + 1)
    devs = np.abs(means - target)
    return ErgodicityReport(
        "ergodic_mean", n_max, target, shifts, means, devs, float(devs[-1]),
        tol, _verdict(devs, tol), None, step,
    )


def _weak_from_sequence(n_max, target, shifts, corr, tol) -> ErgodicityReport:
    means = np.cumsum(np.abs(corr - target)) / np.arange(1, shifts.size + 1)
    return ErgodicityReport(
        "weak_mixing", n_max, target, shifts, means, means, float(means[-1]),
        tol, _verdict(means, tol),
    )


def _strong_from_sequence(n_max, target, shifts, corr, tol) -> ErgodicityReport:
    devs = np.abs(corr - target)
    return ErgodicityReport(
        "strong_mixing", n_max, target, shifts, corr, devs, float(devs[-1]),
        tol, _verdict(devs, tol), fit_decay(devs),
    )


def ergodic_mean_test(
    source,
    a: Operator,
    b: Operator,
    n_max: int = DEFAULT_N_MAX,
    backend: str = "auto",
    tol: float = TRANSFER_TOL,
    step: int = 1,
) -> ErgodicityReport:
    """Does (1/n) sum corr(i) approach tr(rho a) tr(rho b)?

    step > 1 averages over shift multiples of step only (the blocked
    variant of the mean).
    """
    shifts, corr = correlation_sequence(source, a, b, n_max, backend, step)
    return _ergodic_from_sequence(n_max, _pair_target(source, a, b), shifts, corr, tol, step)


def weak_mixing_test(
    source,
    a: Operator,
    b: Operator,
    n_max: int = DEFAULT_N_MAX,
    backend: str = "auto",
    tol: float = TRANSFER_TOL,
) -> ErgodicityReport:
    """Does (1/n) sum |corr(i) - target| approach zero?"""
    shifts, corr = correlation_sequence(source, a, b, n_max, backend)
    return _weak_from_sequence(n_max, _pair_target(source, a, b), shifts, corr, tol)


def strong_mixing_test(
    source,
    a: Operator,
    b: Operator,
    n_max: int = DEFAULT_N_MAX,
    backend: str = "auto",
    tol: float = TRANSFER_TOL,
) -> ErgodicityReport:
    """Does corr(i) itself approach the target?  Includes a decay fit."""
    shifts, corr = correlation_sequence(source, a, b, n_max, backend)
    return _strong_from_sequence(n_max, _pair_target(source, a, b), shifts, corr, tol)


# ---------------------------------------------------------------------------
# sweeps over observable pairs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PairReport:
    """The three tests for one (a, b) observable pair."""

    label: str
    ergodic_mean: ErgodicityReport
    weak_mixing: ErgodicityReport
    strong_mixing: ErgodicityReport

    @property
    def verdicts(self) -> tuple:
        return (
            self.ergodic_mean.verdict,
            self.weak_mixing.verdict,
            self.strong_mixing.verdict,
        )

    @property
    def reports(self) -> tuple:
        return (self.ergodic_mean, self.weak_mixing, self.strong_mixing)


@dataclass(frozen=True, eq=False)
class SourceSweepReport:
    """Worst-case verdicts over a family of observable pairs.

    A convergence property of the source must hold for every pair, so the
    source verdict per test is the worst pair verdict (fail beats
    inconclusive beats pass).  monotone_ok records whether the triple is
    ordered as implication demands (strong conclusion never stronger than
    weak, weak never stronger than ergodic mean).
    """

    block_sites: int
    n_max: int
    backend: str
    tol: float
    pairs: tuple
    ergodic_mean: str
    weak_mixing: str
    strong_mixing: str
    note: str

    @property
    def verdicts(self) -> tuple:
        return (self.ergodic_mean, self.weak_mixing, self.strong_mixing)

    @property
    def monotone_ok(self) -> bool:
        e, w, s = (_ORDER[v] for v in self.verdicts)
        return e >= w >= s

    @property
    def decay_rates(self) -> dict:
        return {
            p.label: p.strong_mixing.decay.rate
            for p in self.pairs
            if p.strong_mixing.decay is not None
        }


def projector_pairs(site_dim: int, block_sites: int, limit: int = 8) -> list:
    """Diagonal word-projector pairs (E_w, E_w), at most ``limit`` of them."""
    words = []
    for idx in range(min(site_dim**block_sites, limit)):
        word = []
        x = idx
        for _ in range(block_sites):
            word.append(x % site_dim)
            x //= site_dim
        words.append(tuple(reversed(word)))
    out = []
    for w in words:
        p = word_projector(w, site_dim)
        label = "proj_" + "".join(str(s) for s in w)
        out.append((label, p, p))
    return out


def random_pairs(site_dim: int, block_sites: int, count: int, seed: int) -> list:
    """Seeded Hermitian observable pairs with unit spectral norm."""
    child = np.random.SeedSequence(seed).generate_state(2 * count)
    out = []
    for t in range(count):
        a = random_observable(block_sites, int(child[2 * t]), site_dim)
        b = random_observable(block_sites, int(child[2 * t + 1]), site_dim)
        out.append((f"rand_{t}", a, b))
    return out


def _resolve_backend(source, backend: str) -> str:
    if backend != "auto":
        return backend
    base, _ = _peel_transforms(source, [])
    return (
        "transfer"
        if isinstance(base, (IIDSource, ClassicallyCorrelatedSource))
        else "dense"
    )


def sweep_report(
    source,
    block_sites: int = 1,
    n_max: int = DEFAULT_N_MAX,
    backend: str = "auto",
    tol: float | None = None,
    random_pair_count: int = 2,
    seed: int = 0,
    extra_pairs: list | None = None,
) -> SourceSweepReport:
    """Run all three tests over projector pairs plus seeded random pairs.

    tol defaults to 1e-2 on the transfer route and 5e-2 on the dense
    route (short dense horizons leave larger finite-size remainders).
    """
    backend = _resolve_backend(source, backend)
    if tol is None:
        tol = TRANSFER_TOL if backend == "transfer" else DENSE_TOL
    pairs = projector_pairs(source.site_dim, block_sites)
    pairs += random_pairs(source.site_dim, block_sites, random_pair_count, seed)
    if extra_pairs:
        pairs += list(extra_pairs)
    pair_reports = []
    for label, a, b in pairs:
        shifts, corr = correlation_sequence(source, a, b, n_max, backend)
        target = _pair_target(source, a, b)
        pair_reports.append(
            PairReport(
                label,
                _ergodic_from_sequence(n_max, target, shifts, corr, tol, 1),
                _weak_from_sequence(n_max, target, shifts, corr, tol),
                _strong_from_sequence(n_max, target, shifts, corr, tol),
            )
        )
    worst = [
        min((p.verdicts[t] for p in pair_reports), key=_ORDER.__getitem__)
        for t in range(3)
    ]
    note = (
        f"worst-case aggregation over {len(pair_reports)} observable pairs; "
        f"finite horizon n_max={n_max}, verdicts are trend heuristics, not proofs"
    )
    return SourceSweepReport(
        block_sites, n_max, backend, tol, tuple(pair_reports),
        worst[0], worst[1], worst[2], note,
    )
