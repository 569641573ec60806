"""Conditional expectation onto a product basis, and the state/measure bridge.

Fix one orthonormal basis u of the site space and use its tensor powers
as the chain basis {|w>}.  The pinching map

    E(a) = sum_w |w><w| a |w><w|

is the conditional expectation onto the maximal abelian subalgebra of
operators diagonal in that basis.  Diagonal entries of a state in the
same basis form a probability measure on words, mu(w) = <w| rho |w>,
and placing a measure back on the diagonal inverts the map.  Pinching a
consistent (or stationary) source yields a consistent (or stationary)
measure and vice versa, which is what the bridge tests exercise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import _apply_sitewise
from .classical import MeasureTable
from .errors import ShapeMismatchError
from .operators import DensityOperator, Operator

PINCH_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PinchingBasis:
    """A single-site orthonormal basis, used sitewise on any chain length.

    ``site_vectors`` holds the basis states as columns of a unitary.
    """

    site_vectors: np.ndarray

    def __post_init__(self):
        u = np.array(self.site_vectors, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ShapeMismatchError(f"basis must be a square matrix, got {u.shape}")
        dev = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
        if dev > PINCH_TOL:
            raise ValueError(f"basis columns are not orthonormal: deviation {dev:.3e}")
        u.setflags(write=False)
        object.__setattr__(self, "site_vectors", u)

    @property
    def site_dim(self) -> int:
        return self.site_vectors.shape[0]

    @property
    def is_computational(self) -> bool:
        return bool(np.array_equal(self.site_vectors, np.eye(self.site_dim)))


def computational_basis(site_dim: int = 2) -> PinchingBasis:
    return PinchingBasis(np.eye(site_dim, dtype=complex))


def _to_basis(entries: np.ndarray, basis: PinchingBasis, sites: int) -> np.ndarray:
    u_dag = basis.site_vectors.conj().T
    return _apply_sitewise([u_dag], entries, sites, basis.site_dim)


def _from_basis(entries: np.ndarray, basis: PinchingBasis, sites: int) -> np.ndarray:
    return _apply_sitewise([basis.site_vectors], entries, sites, basis.site_dim)


def conditional_expectation(a: Operator, basis: PinchingBasis) -> Operator:
    """Zero every matrix element off the diagonal of the product basis.

    In the computational basis this is an exact mask, so the map is
    exactly idempotent at machine precision.
    """
    if a.site_dim != basis.site_dim:
        raise ShapeMismatchError("operator site dim does not match basis")
    if basis.is_computational:
        out = np.diag(np.diagonal(a.entries)).astype(complex)
    else:
        rotated = _to_basis(a.entries, basis, a.sites)
        masked = np.diag(np.diagonal(rotated)).astype(complex)
        out = _from_basis(masked, basis, a.sites)
    return Operator(out, a.sites, a.site_dim)


def diagonal_observable(values, basis: PinchingBasis) -> Operator:
    """Member of the pinched subalgebra with the given word values.

    ``values`` is a (d,)*m array (complex allowed) of diagonal entries in
    the product basis.
    """
    arr = np.asarray(values, dtype=complex)
    d = basis.site_dim
    if arr.shape != (d,) * arr.ndim or arr.ndim < 1:
        raise ShapeMismatchError(f"values must have shape (d,)*m with d={d}, got {arr.shape}")
    mat = np.diag(arr.reshape(-1))
    out = mat if basis.is_computational else _from_basis(mat, basis, arr.ndim)
    return Operator(out, arr.ndim, d)


def state_to_measure(rho: DensityOperator, basis: PinchingBasis) -> np.ndarray:
    """mu(w) = <w| rho |w> as a (d,)*m array of word probabilities."""
    if rho.site_dim != basis.site_dim:
        raise ShapeMismatchError("state site dim does not match basis")
    if basis.is_computational:
        diag = np.diagonal(rho.entries)
    else:
        diag = np.diagonal(_to_basis(rho.entries, basis, rho.sites))
    return np.real(diag).reshape((basis.site_dim,) * rho.sites)


def measure_to_state(values, basis: PinchingBasis) -> DensityOperator:
    """Diagonal state sum_w mu(w) |w><w| from a (d,)*m probability table."""
    arr = np.asarray(values, dtype=float)
    if np.any(arr < -PINCH_TOL):
        raise ValueError("word probabilities must be nonnegative")
    if abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError(f"word probabilities sum to {arr.sum()}, expected 1")
    op = diagonal_observable(np.clip(arr, 0.0, None), basis)
    return DensityOperator(op)


def source_measure_table(source, basis: PinchingBasis, max_len: int) -> MeasureTable:
    """Pinch rho_1 .. rho_max_len of a source into one classical word measure."""
    tables = tuple(
        state_to_measure(source.density(m), basis) for m in range(1, max_len + 1)
    )
    return MeasureTable(basis.site_dim, tables)


@dataclass(frozen=True, eq=False)
class PinchedSource:
    """The source m -> E^(x m)(rho_m): every member pinched in one basis."""

    base: object
    basis: PinchingBasis

    @property
    def site_dim(self) -> int:
        return self.base.site_dim

    @property
    def kind(self) -> str:
        return "pinched"

    def density(self, sites: int) -> DensityOperator:
        rho = self.base.density(sites)
        return DensityOperator(conditional_expectation(rho.op, self.basis))


@dataclass(frozen=True)
class PinchingPropertyReport:
    """Numerical deviations of the pinching map from its defining properties.

    positivity: smallest eigenvalue of E(p) over random psd inputs p;
    idempotence: max |E(E(a)) - E(a)|; fixed points: max |E(b) - b| for
    diagonal b; module: max |E(a b) - E(a) b| for diagonal b; trace:
    max |tr E(a) - tr a|.
    """

    positivity_min_eig: float
    idempotence_deviation: float
    fixed_point_deviation: float
    module_deviation: float
    trace_deviation: float
    trials: int
    tol: float = PINCH_TOL

    @property
    def passed(self) -> bool:
        return (
            self.positivity_min_eig >= -self.tol
            and self.idempotence_deviation <= self.tol
            and self.fixed_point_deviation <= self.tol
            and self.module_deviation <= self.tol
            and self.trace_deviation <= self.tol
        )


def verify_expectation_properties(
    basis: PinchingBasis, sites: int, seed: int, trials: int = 8
) -> PinchingPropertyReport:
    """Exercise the conditional-expectation laws on seeded random operators."""
    d = basis.site_dim
    dim = d**sites
    rng = np.random.default_rng(seed)
    pos_min = np.inf
    idem = fixed = module = trace = 0.0
    for _ in range(trials):
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        a = Operator((m + m.conj().T) / 2.0, sites, d)
        psd = Operator(m @ m.conj().T, sites, d)
        diag_vals = rng.standard_normal((d,) * sites) + 1j * rng.standard_normal((d,) * sites)
        b = diagonal_observable(diag_vals, basis)

        ea = conditional_expectation(a, basis)
        pos_min = min(
            pos_min,
            float(np.min(np.linalg.eigvalsh(conditional_expectation(psd, basis).entries))),
        )
        idem = max(
            idem,
            float(np.max(np.abs(conditional_expectation(ea, basis).entries - ea.entries))),
        )
        fixed = max(
            fixed,
            float(np.max(np.abs(conditional_expectation(b, basis).entries - b.entries))),
        )
        ab = Operator(a.entries @ b.entries, sites, d)
        module = max(
            module,
            float(
                np.max(
                    np.abs(conditional_expectation(ab, basis).entries - ea.entries @ b.entries)
                )
            ),
        )
        trace = max(trace, float(abs(np.trace(ea.entries) - np.trace(a.entries))))
    return PinchingPropertyReport(float(pos_min), idem, fixed, module, trace, trials)
