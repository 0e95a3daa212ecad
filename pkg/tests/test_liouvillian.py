import numpy as np
import pytest
from scipy.linalg import expm

from pcdimer.exceptions import DomainError
from pcdimer.hilbert import CompositeSpace, DensityMatrix, Operator, boson, qubit
from pcdimer.liouvillian import (
    assemble_generator,
    build_liouvillian,
    commutator_superoperator,
    dephasing_dissipator,
    devectorize,
    dissipator,
    incoherent_pump_dissipator,
    identity_bra,
    vectorize,
)
from pcdimer.model import (
    HBAR_UEV_PS,
    CouplingMatrix,
    DriveParams,
    ModeParams,
    QDParams,
    SystemParams,
    build_effective_hamiltonian,
    preset_params,
)

QUBIT = CompositeSpace((qubit(),))


def random_density(rng, dim):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def propagate(liouville, rho0, t):
    """Dense matrix-exponential propagation, the module-independent oracle."""
    vec = rho0.reshape(-1, order="F")
    out = expm(liouville.matrix.toarray() * t) @ vec
    d = rho0.shape[0]
    return out.reshape((d, d), order="F")


class TestVectorization:
    def test_round_trip(self):
        rng = np.random.default_rng(61)
        space = CompositeSpace((qubit(), qubit()))
        rho = DensityMatrix(space, random_density(rng, 4))
        assert np.array_equal(devectorize(vectorize(rho)), rho.matrix)

    def test_sandwich_identity(self):
        # vec(A rho B) == (B^T kron A) vec(rho) for column stacking
        rng = np.random.default_rng(67)
        for _ in range(10):
            a, rho, b = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
                         for _ in range(3))
            lhs = (a @ rho @ b).reshape(-1, order="F")
            rhs = np.kron(b.T, a) @ rho.reshape(-1, order="F")
            assert np.allclose(lhs, rhs, atol=1e-12)

    def test_trace_pairs_with_identity_bra(self):
        rng = np.random.default_rng(71)
        space = CompositeSpace((qubit(), boson(2)))
        rho = DensityMatrix(space, random_density(rng, 6))
        bra = identity_bra(space)
        assert np.isclose(bra @ vectorize(rho).vector, 1.0)

    def test_devectorize_rejects_bad_length(self):
        with pytest.raises(DomainError):
            devectorize(np.zeros(5))


class TestDissipator:
    def test_zero_rate_is_zero(self):
        from pcdimer.hilbert import qubit_lowering

        d = dissipator(qubit_lowering(QUBIT, 0), 0.0)
        assert d.matrix.nnz == 0

    def test_negative_rate_rejected(self):
        from pcdimer.hilbert import qubit_lowering

        with pytest.raises(DomainError):
            dissipator(qubit_lowering(QUBIT, 0), -1.0)

    def test_amplitude_damping_law(self):
        # analytic decay: excited population e^(-gamma t / hbar); equals 1/e
        # at t = hbar / gamma
        from pcdimer.hilbert import qubit_lowering

        gamma = 40.0
        h = Operator(QUBIT, np.zeros((2, 2)))
        liouville = assemble_generator(h, [(qubit_lowering(QUBIT, 0), gamma)])
        rho0 = np.diag([0.0, 1.0]).astype(complex)
        for t in (0.5, HBAR_UEV_PS / gamma, 30.0):
            rho_t = propagate(liouville, rho0, t)
            assert np.isclose(rho_t[1, 1].real, np.exp(-gamma * t / HBAR_UEV_PS),
                              atol=1e-12)

    def test_trace_annihilated_for_random_jumps(self):
        rng = np.random.default_rng(73)
        space = CompositeSpace((qubit(), boson(1)))
        bra = identity_bra(space)
        for _ in range(5):
            jump = Operator(space, rng.standard_normal((4, 4))
                            + 1j * rng.standard_normal((4, 4)))
            d = dissipator(jump, rng.uniform(0.1, 10.0))
            assert np.max(np.abs(bra @ d.matrix)) < 1e-10 * max(
                1.0, abs(d.matrix).max())


class TestDephasing:
    def test_populations_untouched(self):
        liouville = 1.0 / HBAR_UEV_PS * dephasing_dissipator(0, 3.0, QUBIT)
        rng = np.random.default_rng(79)
        rho0 = random_density(rng, 2)
        rho_t = propagate(liouville, rho0, 25.0)
        assert np.allclose(np.diag(rho_t), np.diag(rho0), atol=1e-12)

    def test_coherence_decay_rate(self):
        # the rate argument is the coherence-decay rate: |rho_ge(t)| falls
        # as e^(-gamma_d t / hbar)
        gamma_d = 2.5
        liouville = 1.0 / HBAR_UEV_PS * dephasing_dissipator(0, gamma_d, QUBIT)
        rho0 = np.full((2, 2), 0.5, dtype=complex)
        for t in (1.0, 100.0, 700.0):
            rho_t = propagate(liouville, rho0, t)
            assert np.isclose(rho_t[0, 1], 0.5 * np.exp(-gamma_d * t / HBAR_UEV_PS),
                              atol=1e-12)

    def test_zero_rate(self):
        assert dephasing_dissipator(1, 0.0, preset_params(
            "dimer30_dc901").space()).matrix.nnz == 0

    def test_invalid_dot_index(self):
        with pytest.raises(DomainError):
            dephasing_dissipator(2, 1.0, QUBIT)


class TestIncoherentPump:
    def test_zero_rate(self):
        space = CompositeSpace((boson(1),))
        assert incoherent_pump_dissipator(0, 0.0, space).matrix.nnz == 0

    def test_truncated_mode_rate_balance(self):
        # two-level rate equations for the cutoff-1 mode give the steady
        # photon number P / (P + gamma)
        from pcdimer.solvers import steady_state
        from pcdimer.hilbert import boson_annihilation

        space = CompositeSpace((boson(1),))
        pump_rate, loss_rate = 3.0, 11.0
        h = Operator(space, np.zeros((2, 2)))
        a = boson_annihilation(space, 0)
        liouville = assemble_generator(h, [(a, loss_rate), (a.dag(), pump_rate)])
        rho = steady_state(liouville)
        n = (a.dag() @ a).expectation(rho)
        assert np.isclose(n, pump_rate / (pump_rate + loss_rate), atol=1e-12)

    def test_trace_preserved(self):
        space = CompositeSpace((boson(2),))
        d = incoherent_pump_dissipator(0, 2.0, space)
        assert d.trace_defect() < 1e-10

    def test_invalid_mode_index(self):
        with pytest.raises(DomainError):
            incoherent_pump_dissipator(3, 1.0, preset_params(
                "dimer30_dc901").space())


def dense_reference_generator(params):
    """Brute-force dense construction by explicit Kronecker products,
    independent of the sparse assembly path."""
    space = params.space()
    d = space.total_dim
    h = build_effective_hamiltonian(params).matrix
    eye = np.eye(d)
    total = -1j * (np.kron(eye, h) - np.kron(h.T, eye))

    def lower(dim):
        return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)

    def embed(local, position):
        mats = [np.eye(dim, dtype=complex) for dim in space.dims]
        mats[position] = local
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    jumps = []
    nb = params.truncation + 1
    for m in range(2):
        a = embed(lower(nb), 2 + m)
        jumps.append((a, params.modes[m].gamma))
        jumps.append((a.conj().T, params.modes[m].pump))
    for n in range(2):
        sm = embed(np.array([[0, 1], [0, 0]], dtype=complex), n)
        jumps.append((sm, params.dots[n].gamma))
        jumps.append((sm.conj().T @ sm, 2.0 * params.dots[n].gamma_d))
    for c, rate in jumps:
        cdc = c.conj().T @ c
        total = total + rate * (
            np.kron(c.conj(), c)
            - 0.5 * np.kron(eye, cdc)
            - 0.5 * np.kron(cdc.T, eye)
        )
    return total / HBAR_UEV_PS


def full_params():
    return SystemParams(
        modes=(ModeParams(0.0, 67.0, pump=0.4), ModeParams(2200.0, 37.0, pump=0.1)),
        dots=(QDParams(0.0, gamma=0.66, gamma_d=0.8),
              QDParams(3.0, gamma=1.1, gamma_d=0.2)),
        coupling=CouplingMatrix(((110.0, 110.0), (110.0, -110.0))),
        drive=DriveParams(amplitude=1.0, phase1=np.pi, pump_freq=-11.0),
        truncation=1,
    )


class TestBuildLiouvillian:
    def test_dimension(self):
        liouville = build_liouvillian(preset_params("dimer30_dc901"))
        assert liouville.matrix.shape == (256, 256)

    def test_sparse_matches_dense_reference(self):
        params = full_params()
        sparse = build_liouvillian(params).matrix.toarray()
        dense = dense_reference_generator(params)
        assert np.max(np.abs(sparse - dense)) < 1e-12

    def test_trace_preservation(self):
        liouville = build_liouvillian(full_params())
        assert liouville.trace_defect() < 1e-10

    def test_dissipativity(self):
        liouville = build_liouvillian(full_params())
        eigenvalues = np.linalg.eigvals(liouville.matrix.toarray())
        assert eigenvalues.real.max() <= 1e-9

    def test_closed_system_spectrum_is_level_differences(self):
        # with no losses the generator is -i [H, .] / hbar: its spectrum is
        # i (E_j - E_k) / hbar for all level pairs
        params = SystemParams(
            modes=(ModeParams(0.0, 0.0), ModeParams(500.0, 0.0)),
            dots=(QDParams(0.0), QDParams(0.0)),
            coupling=CouplingMatrix(((110.0, 110.0), (110.0, -110.0))),
            drive=DriveParams(amplitude=0.0),
            truncation=1,
        )
        liouville = build_liouvillian(params)
        h_vals = np.linalg.eigvalsh(build_effective_hamiltonian(params).matrix)
        expected = np.sort_complex(
            1j * (h_vals[None, :] - h_vals[:, None]).ravel() / HBAR_UEV_PS)
        actual = np.sort_complex(np.linalg.eigvals(liouville.matrix.toarray()))
        assert np.allclose(np.sort(actual.imag), np.sort(expected.imag), atol=1e-10)
        assert np.max(np.abs(actual.real)) < 1e-10

    def test_hermiticity_preserved_under_application(self):
        rng = np.random.default_rng(83)
        liouville = build_liouvillian(full_params())
        for _ in range(5):
            rho = random_density(rng, 16)
            image = liouville.apply_to_matrix(rho)
            assert np.max(np.abs(image - image.conj().T)) < 1e-12

    def test_positivity_along_sampled_evolution(self):
        liouville = build_liouvillian(full_params())
        space = full_params().space()
        rho0 = DensityMatrix.basis_state(space, (1, 0, 0, 0))
        for t in (0.5, 5.0, 50.0, 500.0):
            rho_t = propagate(liouville, rho0.matrix, t)
            assert np.linalg.eigvalsh(0.5 * (rho_t + rho_t.conj().T)).min() >= -1e-8

    def test_commutator_superoperator_action(self):
        rng = np.random.default_rng(89)
        space = CompositeSpace((qubit(), qubit()))
        h = rng.standard_normal((4, 4))
        h = Operator(space, h + h.T)
        comm = commutator_superoperator(h)
        rho = random_density(rng, 4)
        expected = -1j * (h.matrix @ rho - rho @ h.matrix)
        assert np.allclose(comm.apply_to_matrix(rho), expected, atol=1e-12)
