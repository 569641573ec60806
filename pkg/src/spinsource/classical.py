"""Finite-alphabet classical processes: iid, Markov, and mixtures.

A process here is a shift-invariant (or deliberately not) measure on
one-sided symbol sequences, represented by enough structure to compute
any finite-word probability exactly.  The module also carries the
analytic ergodicity classifier used as an oracle for the numerical
mixing tests: for finite-state chains the three properties have clean
structural characterizations (Cesaro convergence needs an irreducible
support, full mixing additionally needs aperiodicity, and a nontrivial
mixture of distinct stationary measures is never ergodic).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import numpy as np

from .errors import CapExceededError, ShapeMismatchError

CONSISTENCY_TOL = 1e-9
STOCHASTIC_TOL = 1e-10
WORD_ENUMERATION_CAP = 10**6
_EIG_ONE_TOL = 1e-9


def _check_word_cap(k: int, length: int) -> None:
    if k**length > WORD_ENUMERATION_CAP:
        raise CapExceededError(
            f"{k}**{length} words exceeds enumeration cap {WORD_ENUMERATION_CAP}",
            cap=WORD_ENUMERATION_CAP,
        )


def _probability_vector(p, what: str) -> np.ndarray:
    arr = np.array(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ShapeMismatchError(f"{what} must be a 1-d probability vector")
    if np.any(arr < -STOCHASTIC_TOL):
        raise ValueError(f"{what} has negative entries")
    if abs(arr.sum() - 1.0) > STOCHASTIC_TOL:
        raise ValueError(f"{what} sums to {arr.sum()}, expected 1")
    arr = np.clip(arr, 0.0, None)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class IIDProcess:
    """Independent identically distributed symbols with marginal ``probs``."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _probability_vector(self.probs, "iid marginal"))

    @property
    def alphabet_size(self) -> int:
        return self.probs.size

    @property
    def kind(self) -> str:
        return "iid"


@dataclass(frozen=True, eq=False)
class MarkovProcess:
    """Stationary-by-default Markov chain with row-stochastic ``transition``.

    ``initial`` defaults to a stationary distribution of the chain, which
    makes the process shift invariant.  A different initial distribution
    is allowed and yields a non-stationary process.
    """

    transition: np.ndarray
    initial: np.ndarray | None = None

    def __post_init__(self):
        p = np.array(self.transition, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ShapeMismatchError(f"transition must be square, got shape {p.shape}")
        if np.any(p < -STOCHASTIC_TOL):
            raise ValueError("transition matrix has negative entries")
        row_dev = float(np.max(np.abs(p.sum(axis=1) - 1.0)))
        if row_dev > STOCHASTIC_TOL:
            raise ValueError(f"transition rows must sum to 1, worst deviation {row_dev:.3e}")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "transition", p)
        if self.initial is None:
            pi, _ = stationary_distribution(p)
            object.__setattr__(self, "initial", pi)
        else:
            object.__setattr__(
                self, "initial", _probability_vector(self.initial, "initial distribution")
            )
        if self.initial.size != p.shape[0]:
            raise ShapeMismatchError("initial distribution size does not match transition")

    @property
    def alphabet_size(self) -> int:
        return self.transition.shape[0]

    @property
    def kind(self) -> str:
        return "markov"

    def is_stationary(self, tol: float = CONSISTENCY_TOL) -> bool:
        return bool(np.max(np.abs(self.initial @ self.transition - self.initial)) <= tol)


@dataclass(frozen=True, eq=False)
class MixtureProcess:
    """Convex combination of iid or Markov components (no nesting)."""

    weights: np.ndarray
    components: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "weights", _probability_vector(self.weights, "mixture weights")
        )
        comps = tuple(self.components)
        if len(comps) != self.weights.size:
            raise ShapeMismatchError("one weight per component required")
        if not comps:
            raise ValueError("mixture needs at least one component")
        sizes = set()
        for c in comps:
            if isinstance(c, MixtureProcess):
                raise TypeError("mixtures of mixtures are not supported; flatten first")
            if not isinstance(c, (IIDProcess, MarkovProcess)):
                raise TypeError(f"unsupported component type {type(c).__name__}")
            sizes.add(c.alphabet_size)
        if len(sizes) != 1:
            raise ShapeMismatchError(f"components disagree on alphabet size: {sorted(sizes)}")
        object.__setattr__(self, "components", comps)

    @property
    def alphabet_size(self) -> int:
        return self.components[0].alphabet_size

    @property
    def kind(self) -> str:
        return "mixture"


ClassicalProcess = IIDProcess | MarkovProcess | MixtureProcess


def stationary_distribution(transition) -> tuple[np.ndarray, bool]:
    """A stationary distribution of a row-stochastic matrix and a uniqueness flag.

    Uniqueness is decided by the multiplicity of eigenvalue 1.  For a
    reducible chain with several closed classes the returned vector is one
    valid choice and the flag is False.
    """
    p = np.asarray(transition, dtype=float)
    vals, vecs = np.linalg.eig(p.T)
    close = np.where(np.abs(vals - 1.0) < _EIG_ONE_TOL)[0]
    if close.size == 0:
        raise ValueError("no eigenvalue 1; matrix is not stochastic")
    unique = close.size == 1
    v = np.real(vecs[:, close[0]])
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0.0, None)
    pi = v / v.sum()
    # polish with a few power iterations to wash out eig roundoff
    for _ in range(5):
        pi = pi @ p
    pi = pi / pi.sum()
    pi.setflags(write=False)
    return pi, bool(unique)


# ---------------------------------------------------------------------------
# word probabilities
# ---------------------------------------------------------------------------


def marginal_table(process: ClassicalProcess, length: int) -> np.ndarray:
    """All word probabilities of a given length as a (k,)*length array."""
    if length < 1:
        raise ValueError(f"word length must be >= 1, got {length}")
    k = process.alphabet_size
    _check_word_cap(k, length)
    if isinstance(process, IIDProcess):
        table = process.probs
        for _ in range(length - 1):
            table = np.multiply.outer(table, process.probs)
        return table
    if isinstance(process, MarkovProcess):
        table = process.initial.copy()
        for _ in range(length - 1):
            table = table[..., None] * process.transition
        return table
    return sum(
        w * marginal_table(c, length)
        for w, c in zip(process.weights, process.components)
    )


def word_probability(process: ClassicalProcess, word) -> float:
    """Probability of one finite word starting at time 1."""
    word = tuple(int(s) for s in word)
    if not word:
        raise ValueError("word must be nonempty")
    k = process.alphabet_size
    if any(s < 0 or s >= k for s in word):
        raise ValueError(f"word {word} has symbols outside range({k})")
    if isinstance(process, IIDProcess):
        return float(np.prod([process.probs[s] for s in word]))
    if isinstance(process, MarkovProcess):
        p = process.initial[word[0]]
        for a, b in zip(word, word[1:]):
            p *= process.transition[a, b]
        return float(p)
    return float(
        sum(w * word_probability(c, word) for w, c in zip(process.weights, process.components))
    )


@dataclass(frozen=True, eq=False)
class MeasureTable:
    """Word probabilities up to a maximum length, one dense array per length."""

    alphabet_size: int
    tables: tuple

    def __post_init__(self):
        k = self.alphabet_size
        tabs = []
        for ell, t in enumerate(self.tables, start=1):
            arr = np.array(t, dtype=float)
            if arr.shape != (k,) * ell:
                raise ShapeMismatchError(
                    f"length-{ell} table has shape {arr.shape}, expected {(k,) * ell}"
                )
            arr.setflags(write=False)
            tabs.append(arr)
        if not tabs:
            raise ValueError("measure table needs at least length 1")
        object.__setattr__(self, "tables", tuple(tabs))

    @property
    def max_len(self) -> int:
        return len(self.tables)

    def prob(self, word) -> float:
        word = tuple(int(s) for s in word)
        if not 1 <= len(word) <= self.max_len:
            raise ValueError(f"word length {len(word)} outside 1..{self.max_len}")
        return float(self.tables[len(word) - 1][word])


def measure_table(process: ClassicalProcess, max_len: int) -> MeasureTable:
    """Tabulate a process's word probabilities up to ``max_len``."""
    return MeasureTable(
        process.alphabet_size,
        tuple(marginal_table(process, ell) for ell in range(1, max_len + 1)),
    )


@dataclass(frozen=True)
class ClassicalConsistencyReport:
    """Worst-case extension deviations of a word measure.

    right: mu(w) vs sum_y mu(wy); left: mu(w) vs sum_x mu(xw).  Equality
    of both is consistency plus shift invariance.
    """

    max_len: int
    right_deviation: float
    left_deviation: float
    normalization_deviation: float
    worst_word: tuple
    tol: float = CONSISTENCY_TOL

    @property
    def consistent(self) -> bool:
        return (
            self.right_deviation <= self.tol
            and self.normalization_deviation <= self.tol
        )

    @property
    def stationary(self) -> bool:
        return self.consistent and self.left_deviation <= self.tol


def check_measure_consistency(table: MeasureTable) -> ClassicalConsistencyReport:
    """Compare each length-l table against both marginalizations of length l+1."""
    norm_dev = float(abs(table.tables[0].sum() - 1.0))
    right = 0.0
    left = 0.0
    worst = (0,)
    worst_dev = -1.0
    for ell in range(1, table.max_len):
        short, longer = table.tables[ell - 1], table.tables[ell]
        right_dev = np.abs(longer.sum(axis=-1) - short)
        left_dev = np.abs(longer.sum(axis=0) - short)
        r = float(right_dev.max())
        l = float(left_dev.max())
        right = max(right, r)
        left = max(left, l)
        combined = np.maximum(right_dev, left_dev)
        if combined.max() > worst_dev:
            worst_dev = float(combined.max())
            worst = tuple(int(i) for i in np.unravel_index(np.argmax(combined), combined.shape))
    return ClassicalConsistencyReport(table.max_len, right, left, norm_dev, worst)


def check_classical_consistency(
    process: ClassicalProcess, max_len: int = 4
) -> ClassicalConsistencyReport:
    return check_measure_consistency(measure_table(process, max_len))


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------


def _as_block_table(table, k: int, what: str) -> np.ndarray:
    arr = np.asarray(table, dtype=complex)
    if arr.ndim < 1 or arr.shape != (k,) * arr.ndim:
        raise ShapeMismatchError(
            f"{what} must have shape (k,)*m with k={k}, got {arr.shape}"
        )
    return arr


def block_mean(process: ClassicalProcess, f_table) -> complex:
    """E[f(w_1 .. w_m)] for a dense block function given as a (k,)*m table."""
    f = _as_block_table(f_table, process.alphabet_size, "block function")
    t = marginal_table(process, f.ndim)
    return complex(np.sum(t * f))


def _markov_correlation_sweep(chain: MarkovProcess, f, g, gaps) -> np.ndarray:
    """corr(gap) = sum_w Pr(w) f(w) [P^(gap+1)](w_last, z_first) C(z) g(z)."""
    p = chain.transition
    t_f = marginal_table(chain, f.ndim)
    u = (t_f * f).reshape(-1, chain.alphabet_size).sum(axis=0)
    h = g
    for _ in range(g.ndim - 1):
        h = np.einsum("...ab,ab->...a", h, p)
    out = np.empty(len(gaps), dtype=complex)
    prev_gap = -1
    v = u
    for idx, gap in enumerate(gaps):
        if gap < prev_gap:
            raise ValueError("gaps must be nondecreasing")
        for _ in range(gap - prev_gap):
            v = v @ p
        prev_gap = gap
        out[idx] = v @ h
    return out


def classical_correlation_sweep(process: ClassicalProcess, f_table, g_table, gaps) -> np.ndarray:
    """E[f(w_1..w_m) g(w_{m+gap+1}..w_{m+gap+m'})] for each gap, exactly.

    Tables may be complex valued.  Markov chains are evaluated through the
    transfer structure of the chain, so cost grows linearly in the largest
    gap and never enumerates long words.
    """
    gaps = [int(i) for i in gaps]
    if any(i < 0 for i in gaps):
        raise ValueError("gaps must be >= 0")
    k = process.alphabet_size
    f = _as_block_table(f_table, k, "first block function")
    g = _as_block_table(g_table, k, "second block function")
    if isinstance(process, IIDProcess):
        val = block_mean(process, f) * block_mean(process, g)
        return np.full(len(gaps), val, dtype=complex)
    if isinstance(process, MarkovProcess):
        return _markov_correlation_sweep(process, f, g, sorted(gaps))
    acc = np.zeros(len(gaps), dtype=complex)
    for w, c in zip(process.weights, process.components):
        acc += w * classical_correlation_sweep(c, f_table, g_table, gaps)
    return acc


def classical_correlation(process: ClassicalProcess, f_table, g_table, gap: int) -> complex:
    return complex(classical_correlation_sweep(process, f_table, g_table, [gap])[0])


# ---------------------------------------------------------------------------
# analytic classification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClassificationReport:
    """Structural facts and the exact ergodicity verdict triple for a process.

    The verdict fields describe the shift-invariant process (Markov chains
    are judged as if started from their stationary distribution; the
    ``stationary`` flag records whether the actual initial distribution
    already is stationary).
    """

    kind: str
    stationary: bool
    irreducible: bool
    period: int
    unique_stationary: bool
    ergodic_mean: bool
    weak_mixing: bool
    strong_mixing: bool

    @property
    def verdicts(self) -> tuple:
        return (self.ergodic_mean, self.weak_mixing, self.strong_mixing)


def _support_structure(chain: MarkovProcess) -> tuple:
    """(irreducible, period, unique) of the chain on its invariant support.

    A stationary process is judged on the support of its own initial
    distribution (the invariant measure it actually realizes); a chain
    started elsewhere is judged as if restarted from a stationary one.
    """
    pi, unique = stationary_distribution(chain.transition)
    if chain.is_stationary():
        pi = chain.initial
    support = np.where(pi > 1e-12)[0]
    p = chain.transition[np.ix_(support, support)]
    n = support.size
    adj = p > 1e-14

    def reachable(mat):
        seen = np.zeros(n, dtype=bool)
        seen[0] = True
        frontier = [0]
        while frontier:
            nxt = []
            for u in frontier:
                for v in np.where(mat[u])[0]:
                    if not seen[v]:
                        seen[v] = True
                        nxt.append(v)
            frontier = nxt
        return seen

    irreducible = bool(reachable(adj).all() and reachable(adj.T).all())
    if not irreducible:
        return False, 0, unique
    # BFS levels from state 0; period = gcd over edges of level(u) + 1 - level(v)
    level = np.full(n, -1)
    level[0] = 0
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.where(adj[u])[0]:
                if level[v] < 0:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    period = 0
    for u in range(n):
        for v in np.where(adj[u])[0]:
            period = gcd(period, int(level[u]) + 1 - int(level[v]))
    return True, abs(period), unique


def _tables_equal(a: ClassicalProcess, b: ClassicalProcess, max_len: int = 3) -> bool:
    return all(
        np.allclose(marginal_table(a, ell), marginal_table(b, ell), atol=1e-12)
        for ell in range(1, max_len + 1)
    )


def classify_process(process: ClassicalProcess) -> ClassificationReport:
    """Exact verdict triple (ergodic mean, weak mixing, strong mixing).

    For finite-state stationary chains: Cesaro averaging of correlations
    converges for every observable pair iff the support is a single
    irreducible class; the two mixing notions additionally require
    aperiodicity (and coincide).  A nontrivial mixture of components with
    different finite-word statistics is never ergodic.
    """
    if isinstance(process, IIDProcess):
        return ClassificationReport("iid", True, True, 1, True, True, True, True)
    if isinstance(process, MarkovProcess):
        irreducible, period, unique = _support_structure(process)
        mixing = irreducible and period == 1
        return ClassificationReport(
            "markov",
            process.is_stationary(),
            irreducible,
            period,
            unique,
            irreducible,
            mixing,
            mixing,
        )
    live = [
        (w, c) for w, c in zip(process.weights, process.components) if w > 1e-12
    ]
    stationary = all(
        c.is_stationary() if isinstance(c, MarkovProcess) else True for _, c in live
    )
    all_same = all(_tables_equal(live[0][1], c) for _, c in live[1:])
    if all_same:
        inner = classify_process(live[0][1])
        return ClassificationReport(
            "mixture",
            stationary,
            inner.irreducible,
            inner.period,
            inner.unique_stationary,
            inner.ergodic_mean,
            inner.weak_mixing,
            inner.strong_mixing,
        )
    return ClassificationReport("mixture", stationary, False, 0, False, False, False, False)
