"""Vectorization and sparse assembly of the Lindblad generator.

Vectorization is column-stacking throughout: ``vec(rho) = rho.ravel(order="F")``
and ``vec(A rho B) = (B^T kron A) vec(rho)``.  All superoperator formulas in
this module are written against that convention.

Individual dissipators are returned hbar-scaled (in ueV, like the rates that
enter them); the full generator divides by ``HBAR_UEV_PS`` exactly once at
assembly, so an assembled Liouvillian has units of 1/ps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .exceptions import DomainError
from .hilbert import (
    DEFAULT_POLICY,
    CompositeSpace,
    NumericPolicy,
    Operator,
    boson_annihilation,
    qubit_lowering,
)
from .model import HBAR_UEV_PS, SystemParams, build_effective_hamiltonian

__all__ = [
    "Superoperator",
    "VectorizedState",
    "vectorize",
    "devectorize",
    "commutator_superoperator",
    "dissipator",
    "dephasing_dissipator",
    "incoherent_pump_dissipator",
    "assemble_generator",
    "build_liouvillian",
]


@dataclass(frozen=True)
class Superoperator:
    """Sparse matrix of dimension D^2 x D^2 acting on column-stacked states.

    Trace preservation (the vectorized identity is a left null vector) is
    checked at construction.  Instances are treated as immutable and may be
    shared freely across workers.
    """

    space: CompositeSpace
    matrix: sp.csr_matrix = field(repr=False)
    policy: NumericPolicy = DEFAULT_POLICY

    def __post_init__(self):
        d2 = self.space.total_dim ** 2
        if self.matrix.shape != (d2, d2):
            raise DomainError(
                f"superoperator has shape {self.matrix.shape}, expected ({d2}, {d2})"
            )
        object.__setattr__(self, "matrix", sp.csr_matrix(self.matrix))
        defect = self.trace_defect()
        scale = max(1.0, abs(self.matrix).max() if self.matrix.nnz else 1.0)
        if defect > self.policy.algebraic_tol * scale:
            raise DomainError(
                f"superoperator does not preserve the trace (defect {defect:.3e})"
            )

    @property
    def dim(self) -> int:
        return self.space.total_dim

    def trace_defect(self) -> float:
        """Max magnitude of <<I| L, zero for a trace-preserving generator."""
        bra = identity_bra(self.space)
        return float(np.max(np.abs(bra @ self.matrix)))

    def apply_to_matrix(self, matrix: np.ndarray) -> np.ndarray:
        """Action on a density-matrix-shaped array, returned in matrix form."""
        d = self.dim
        vec = np.asarray(matrix, dtype=complex).reshape(d * d, order="F")
        return (self.matrix @ vec).reshape((d, d), order="F")

    def __add__(self, other: "Superoperator") -> "Superoperator":
        if other.space != self.space:
            raise DomainError("superoperators live on different spaces")
        return Superoperator(self.space, self.matrix + other.matrix, self.policy)

    def __mul__(self, scalar) -> "Superoperator":
        return Superoperator(self.space, self.matrix * scalar, self.policy)

    __rmul__ = __mul__


@dataclass(frozen=True)
class VectorizedState:
    """Column-stacked density matrix of length D^2."""

    space: CompositeSpace
    vector: np.ndarray = field(repr=False)

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=complex).ravel()
        if vec.size != self.space.total_dim ** 2:
            raise DomainError(
                f"vectorized state has length {vec.size}, expected "
                f"{self.space.total_dim ** 2}"
            )
        object.__setattr__(self, "vector", vec)


def identity_bra(space: CompositeSpace) -> np.ndarray:
    """Row vector <<I| whose pairing with vec(rho) gives Tr(rho)."""
    d = space.total_dim
    bra = np.zeros(d * d, dtype=complex)
    bra[:: d + 1] = 1.0
    return bra


def vectorize(rho) -> VectorizedState:
    """Column-stack a density matrix (or operator) into a length-D^2 vector."""
    return VectorizedState(rho.space, rho.matrix.reshape(-1, order="F"))


def devectorize(state, space: CompositeSpace | None = None) -> np.ndarray:
    """Inverse of :func:`vectorize`; returns the raw matrix."""
    if isinstance(state, VectorizedState):
        vec = state.vector
    else:
        vec = np.asarray(state, dtype=complex).ravel()
    d = int(round(np.sqrt(vec.size)))
    if d * d != vec.size:
        raise DomainError(f"vector length {vec.size} is not a perfect square")
    if space is not None and space.total_dim != d:
        raise DomainError(
            f"vector length {vec.size} does not match space dimension "
            f"{space.total_dim}"
        )
    return vec.reshape((d, d), order="F").copy()


def _sparse(matrix: np.ndarray) -> sp.csr_matrix:
    return sp.csr_matrix(matrix)


def commutator_superoperator(h: Operator) -> Superoperator:
    """Superoperator for -i [H, rho]; same energy units as H."""
    hs = _sparse(h.matrix)
    d = h.space.total_dim
    eye = sp.identity(d, dtype=complex, format="csr")
    mat = -1j * (sp.kron(eye, hs, format="coo") - sp.kron(hs.T, eye, format="coo"))
    return Superoperator(h.space, mat.tocsr())


def dissipator(jump: Operator, rate: float) -> Superoperator:
    """Lindblad dissipator rate * (C rho C^dag - {C^dag C, rho} / 2).

    The rate keeps its hbar scaling (ueV); division by hbar happens once,
    in :func:`assemble_generator`.
    """
    if rate < 0:
        raise DomainError(f"dissipator rate must be >= 0, got {rate}")
    d = jump.space.total_dim
    if rate == 0:
        return Superoperator(jump.space,
                             sp.csr_matrix((d * d, d * d), dtype=complex))
    c = _sparse(jump.matrix)
    eye = sp.identity(d, dtype=complex, format="csr")
    cdc = (c.conj().T @ c).tocsr()
    mat = rate * (
        sp.kron(c.conj(), c, format="coo")
        - 0.5 * sp.kron(eye, cdc, format="coo")
        - 0.5 * sp.kron(cdc.T, eye, format="coo")
    )
    return Superoperator(jump.space, mat.tocsr())


def _nth_position(space: CompositeSpace, kind: str, index: int) -> int:
    positions = [k for k, s in enumerate(space.subsystems) if s.kind == kind]
    if not 0 <= index < len(positions):
        raise DomainError(
            f"{kind} index {index} out of range; space has {len(positions)} "
            f"subsystems of that kind"
        )
    return positions[index]


def dephasing_dissipator(dot: int, rate: float, space: CompositeSpace) -> Superoperator:
    """Pure-dephasing dissipator of one emitter, jump operator sigma^+ sigma^-.

    ``rate`` is the emitter's coherence-decay rate: populations are untouched
    and a bare emitter's off-diagonal element decays as exp(-rate * t / hbar).
    The excited-state projector halves the phase-damping efficiency of the
    plain Lindblad form, so the jump is applied at twice the nominal rate to
    keep that normalization.
    """
    sm = qubit_lowering(space, _nth_position(space, "qubit", dot))
    projector = Operator(space, sm.matrix.conj().T @ sm.matrix)
    return dissipator(projector, 2.0 * rate)


def incoherent_pump_dissipator(mode: int, rate: float,
                               space: CompositeSpace) -> Superoperator:
    """Incoherent pumping of one photonic mode, jump operator a^dag."""
    a = boson_annihilation(space, _nth_position(space, "boson", mode))
    return dissipator(a.dag(), rate)


def assemble_generator(h: Operator, jumps) -> Superoperator:
    """Full generator (-i [H, .] + sum of dissipators) / hbar, in 1/ps.

    Parameters
    ----------
    h : Operator
        hbar-scaled Hamiltonian in ueV.
    jumps : iterable of (Operator, float)
        Jump operators with their hbar-scaled rates in ueV; zero-rate entries
        are skipped.
    """
    total = commutator_superoperator(h).matrix.tocoo()
    for jump, rate in jumps:
        if rate == 0:
            continue
        total = total + dissipator(jump, rate).matrix
    return Superoperator(h.space, sp.csr_matrix(total) / HBAR_UEV_PS)


@lru_cache(maxsize=8)
def _unit_dissipators(space: CompositeSpace) -> dict:
    """Unit-rate dissipator matrices for the standard jump set, keyed by
    (channel, index); rate independence makes them cacheable per space."""
    sm = tuple(qubit_lowering(space, n) for n in range(2))
    a = tuple(boson_annihilation(space, 2 + m) for m in range(2))
    units = {}
    for m in range(2):
        units[("loss", m)] = dissipator(a[m], 1.0).matrix
        units[("pump", m)] = dissipator(a[m].dag(), 1.0).matrix
    for n in range(2):
        units[("decay", n)] = dissipator(sm[n], 1.0).matrix
        projector = Operator(space, sm[n].matrix.conj().T @ sm[n].matrix)
        units[("dephasing", n)] = dissipator(projector, 1.0).matrix
    return units


def build_liouvillian(params: SystemParams) -> Superoperator:
    """Lindblad generator of the full system in 1/ps.

    Combines the rotating-frame Hamiltonian with photon loss, emitter decay,
    pure dephasing and incoherent mode pumping for both modes and both
    emitters; the single division by hbar happens here.
    """
    space = params.space()
    h = build_effective_hamiltonian(params, space)
    units = _unit_dissipators(space)

    total = commutator_superoperator(h).matrix
    rates = {}
    for m in range(2):
        rates[("loss", m)] = params.modes[m].gamma
        rates[("pump", m)] = params.modes[m].pump
    for n in range(2):
        rates[("decay", n)] = params.dots[n].gamma
        # gamma_d is the coherence-decay rate; the projector jump needs
        # twice that rate (see dephasing_dissipator)
        rates[("dephasing", n)] = 2.0 * params.dots[n].gamma_d
    for key, rate in rates.items():
        if rate != 0:
            total = total + rate * units[key]
    return Superoperator(space, sp.csr_matrix(total) / HBAR_UEV_PS)
