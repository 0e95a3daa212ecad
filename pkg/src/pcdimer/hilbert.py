"""Composite Hilbert spaces, elementary operators and dense numeric kernels.

The tensor-product convention is fixed once at space construction: subsystem 0
is the slowest index (leftmost Kronecker factor).  Qubits are ordered
(ground, excited); truncated bosons are ordered (0, 1, ..., n_max).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .exceptions import DomainError, SingularSolveError

__all__ = [
    "NumericPolicy",
    "DEFAULT_POLICY",
    "SubsystemSpec",
    "CompositeSpace",
    "Operator",
    "DensityMatrix",
    "qubit",
    "boson",
    "boson_annihilation",
    "qubit_lowering",
    "embed",
    "partial_trace",
    "hermitian_eigenvalues",
    "solve_linear",
]


@dataclass(frozen=True)
class NumericPolicy:
    """Central tolerance record used by all validation checks.

    Attributes
    ----------
    algebraic_tol : float
        Tolerance for algebraic identities (Hermiticity, unit trace, ...).
    positivity_slack : float
        How far below zero an eigenvalue of a density matrix may dip
        before the state is rejected.
    """

    algebraic_tol: float = 1e-10
    positivity_slack: float = 1e-9


DEFAULT_POLICY = NumericPolicy()


@dataclass(frozen=True)
class SubsystemSpec:
    """One tensor factor: a two-level system or a truncated bosonic mode."""

    kind: str  # "qubit" or "boson"
    dim: int

    def __post_init__(self):
        if self.kind not in ("qubit", "boson"):
            raise DomainError(f"unknown subsystem kind {self.kind!r}")
        if self.dim < 2:
            raise DomainError(f"subsystem dimension must be >= 2, got {self.dim}")
        if self.kind == "qubit" and self.dim != 2:
            raise DomainError("a qubit has dimension exactly 2")


def qubit() -> SubsystemSpec:
    return SubsystemSpec("qubit", 2)


def boson(n_max: int) -> SubsystemSpec:
    """Bosonic mode truncated at occupation ``n_max`` (dimension n_max + 1)."""
    return SubsystemSpec("boson", n_max + 1)


@dataclass(frozen=True)
class CompositeSpace:
    """Ordered tensor product of subsystems; ordering is immutable."""

    subsystems: tuple[SubsystemSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "subsystems", tuple(self.subsystems))
        if not self.subsystems:
            raise DomainError("a composite space needs at least one subsystem")

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.subsystems)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def __len__(self) -> int:
        return len(self.subsystems)

    def _check_position(self, position: int, kind: str | None = None) -> SubsystemSpec:
        if not 0 <= position < len(self.subsystems):
            raise DomainError(
                f"subsystem index {position} out of range for {len(self.subsystems)} subsystems"
            )
        sub = self.subsystems[position]
        if kind is not None and sub.kind != kind:
            raise DomainError(f"subsystem {position} is a {sub.kind}, expected a {kind}")
        return sub

    def subspace(self, keep: Sequence[int]) -> "CompositeSpace":
        return CompositeSpace(tuple(self.subsystems[k] for k in keep))


@dataclass(frozen=True)
class Operator:
    """A square complex matrix tagged with the space it acts on."""

    space: CompositeSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if mat.shape != (d, d):
            raise DomainError(
                f"operator matrix has shape {mat.shape}, expected ({d}, {d})"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    def dag(self) -> "Operator":
        return Operator(self.space, self.matrix.conj().T)

    def _coerce(self, other) -> np.ndarray:
        if isinstance(other, Operator):
            if other.space != self.space:
                raise DomainError("operators live on different spaces")
            return other.matrix
        return np.asarray(other, dtype=complex)

    def __add__(self, other) -> "Operator":
        return Operator(self.space, self.matrix + self._coerce(other))

    def __sub__(self, other) -> "Operator":
        return Operator(self.space, self.matrix - self._coerce(other))

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other) -> "Operator":
        return Operator(self.space, self.matrix @ self._coerce(other))

    def expectation(self, rho: "DensityMatrix") -> float:
        """Real part of Tr(self @ rho)."""
        return float(np.trace(self.matrix @ rho.matrix).real)


class DensityMatrix(Operator):
    """Operator that additionally satisfies the state invariants:
    Hermitian, unit trace and positive semidefinite (within the policy)."""

    def __init__(self, space: CompositeSpace, matrix,
                 policy: NumericPolicy = DEFAULT_POLICY):
        super().__init__(space=space, matrix=matrix)
        object.__setattr__(self, "policy", policy)
        self._validate(policy)

    def _validate(self, policy: NumericPolicy):
        m = self.matrix
        herm_defect = np.max(np.abs(m - m.conj().T))
        if herm_defect > policy.algebraic_tol:
            raise DomainError(
                f"density matrix is not Hermitian (defect {herm_defect:.3e})"
            )
        trace_defect = abs(np.trace(m) - 1.0)
        if trace_defect > policy.algebraic_tol:
            raise DomainError(
                f"density matrix trace differs from 1 by {trace_defect:.3e}"
            )
        min_eig = float(np.linalg.eigvalsh(m)[0])
        if min_eig < -policy.positivity_slack:
            raise DomainError(
                f"density matrix has negative eigenvalue {min_eig:.3e}"
            )

    @staticmethod
    def from_pure(space: CompositeSpace, amplitudes,
                  policy: NumericPolicy = DEFAULT_POLICY) -> "DensityMatrix":
        """Density matrix |psi><psi| of a (normalized) pure state."""
        psi = np.asarray(amplitudes, dtype=complex).ravel()
        if psi.shape != (space.total_dim,):
            raise DomainError(
                f"state vector has length {psi.size}, expected {space.total_dim}"
            )
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise DomainError("cannot normalize the zero vector")
        psi = psi / norm
        return DensityMatrix(space, np.outer(psi, psi.conj()), policy)

    @staticmethod
    def basis_state(space: CompositeSpace, occupations: Sequence[int],
                    policy: NumericPolicy = DEFAULT_POLICY) -> "DensityMatrix":
        """Product basis state |n_0 n_1 ... n_k> as a density matrix."""
        dims = space.dims
        if len(occupations) != len(dims):
            raise DomainError("one occupation number per subsystem is required")
        index = 0
        for n, d in zip(occupations, dims):
            if not 0 <= n < d:
                raise DomainError(f"occupation {n} out of range for dimension {d}")
            index = index * d + n
        psi = np.zeros(space.total_dim, dtype=complex)
        psi[index] = 1.0
        return DensityMatrix.from_pure(space, psi, policy)


def _local_annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def embed(local, space: CompositeSpace, position: int) -> Operator:
    """Embed a single-subsystem matrix with identities on all other factors."""
    sub = space._check_position(position)
    local = np.asarray(local, dtype=complex)
    if local.shape != (sub.dim, sub.dim):
        raise DomainError(
            f"local matrix has shape {local.shape}, subsystem {position} "
            f"has dimension {sub.dim}"
        )
    factors = [
        local if k == position else np.eye(d, dtype=complex)
        for k, d in enumerate(space.dims)
    ]
    full = reduce(np.kron, factors)
    return Operator(space, full)


def boson_annihilation(space: CompositeSpace, position: int) -> Operator:
    """Photon destruction operator of the mode at ``position``."""
    sub = space._check_position(position, kind="boson")
    return embed(_local_annihilation(sub.dim), space, position)


def qubit_lowering(space: CompositeSpace, position: int) -> Operator:
    """Lowering operator |g><e| of the two-level system at ``position``."""
    space._check_position(position, kind="qubit")
    return embed(np.array([[0, 1], [0, 0]], dtype=complex), space, position)


def _partial_trace_matrix(matrix: np.ndarray, dims: Sequence[int],
                          keep: Sequence[int]) -> np.ndarray:
    n = len(dims)
    keep = sorted(keep)
    arr = matrix.reshape(tuple(dims) + tuple(dims))
    letters = "abcdefghijklmnopqrstuvwxyz"
    row = list(letters[:n])
    col = list(letters[n:2 * n])
    for k in range(n):
        if k not in keep:
            col[k] = row[k]  # contracted index
    out = "".join(row[k] for k in keep) + "".join(col[k] for k in keep)
    reduced = np.einsum("".join(row) + "".join(col) + "->" + out, arr)
    d_keep = int(np.prod([dims[k] for k in keep]))
    return reduced.reshape(d_keep, d_keep)


def partial_trace(op, keep: Iterable[int]):
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems retain their original relative order.  Returns a
    ``DensityMatrix`` for density-matrix input, otherwise an ``Operator``.
    """
    keep = sorted(set(keep))
    if not keep:
        raise DomainError("keep set must not be empty")
    space = op.space
    for k in keep:
        space._check_position(k)
    reduced = _partial_trace_matrix(op.matrix, space.dims, keep)
    sub_space = space.subspace(keep)
    if isinstance(op, DensityMatrix):
        return DensityMatrix(sub_space, reduced, op.policy)
    return Operator(sub_space, reduced)


def hermitian_eigenvalues(matrix, return_vectors: bool = False,
                          policy: NumericPolicy = DEFAULT_POLICY):
    """Full real spectrum of a Hermitian matrix, ascending.

    Rejects inputs whose Hermiticity defect exceeds the policy tolerance
    (scaled by the magnitude of the largest entry).
    """
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    defect = float(np.max(np.abs(m - m.conj().T)))
    if defect > policy.algebraic_tol * scale:
        raise DomainError(f"matrix is not Hermitian (defect {defect:.3e})")
    if return_vectors:
        vals, vecs = np.linalg.eigh(m)
        return vals, vecs
    return np.linalg.eigvalsh(m)


def solve_linear(a, b, policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Solve ``a @ x = b`` with a residual guarantee.

    Raises ``SingularSolveError`` (carrying a condition estimate) when the
    system is singular to working precision or the residual bound
    ``||ax - b|| <= tol * (||a|| ||x|| + ||b||)`` cannot be met.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise DomainError("right-hand side length does not match the matrix")
    try:
        x = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSolveError(
            f"linear solve failed: {exc}", condition_estimate=float("inf")
        ) from exc
    residual = np.linalg.norm(a @ x - b)
    bound = policy.algebraic_tol * (
        np.linalg.norm(a) * np.linalg.norm(x) + np.linalg.norm(b)
    )
    if not np.isfinite(residual) or residual > bound:
        cond = float(np.linalg.cond(a))
        raise SingularSolveError(
            f"linear solve residual {residual:.3e} exceeds bound {bound:.3e} "
            f"(condition estimate {cond:.3e})",
            condition_estimate=cond,
        )
    return x
