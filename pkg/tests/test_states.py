import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tomofree.errors import InvalidArgument, NotAState
from tomofree.states import (
    HAAR_PURE,
    HILBERT_SCHMIDT,
    BlochDecomposition,
    RandomStateMeasure,
    StateFamily,
    bloch_compose,
    bloch_decompose,
    horodecki,
    make_family,
    partial_trace,
    partial_transpose,
    pauli,
    pure,
    purity,
    random_state,
    tensor_and_permute,
    werner,
)

SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)
SINGLET_DM = np.outer(SINGLET, SINGLET)
VV = np.diag([0, 0, 0, 1.0]).astype(complex)
MIXED = np.eye(4) / 4


def test_pauli_three_is_diagonal():
    assert np.array_equal(pauli(3), np.diag([1, -1]))


def test_pauli_involution_and_product():
    assert np.allclose(pauli(1) @ pauli(1), np.eye(2), atol=1e-15)
    assert np.allclose(pauli(1) @ pauli(2), 1j * pauli(3), atol=1e-15)


def test_pauli_anticommutation():
    for i, j in itertools.product((1, 2, 3), repeat=2):
        anti = pauli(i) @ pauli(j) + pauli(j) @ pauli(i)
        assert np.allclose(anti, 2 * (i == j) * np.eye(2), atol=1e-15)


@pytest.mark.parametrize("i", [1, 2, 3])
def test_pauli_hermitian_traceless(i):
    s = pauli(i)
    assert np.allclose(s, s.conj().T)
    assert abs(np.trace(s)) < 1e-15


@pytest.mark.parametrize("bad", [0, 4, -1, 1.5, True])
def test_pauli_rejects_bad_index(bad):
    with pytest.raises(InvalidArgument):
        pauli(bad)


def test_decompose_examples():
    d = bloch_decompose(MIXED)
    assert np.allclose(d.x, 0) and np.allclose(d.y, 0) and np.allclose(d.T, 0)
    d = bloch_decompose(SINGLET_DM)
    assert np.allclose(d.x, 0, atol=1e-15) and np.allclose(d.y, 0, atol=1e-15)
    assert np.allclose(d.T, -np.eye(3), atol=1e-15)
    d = bloch_decompose(VV)
    assert np.allclose(d.x, [0, 0, -1]) and np.allclose(d.y, [0, 0, -1])
    assert np.allclose(d.T, np.diag([0, 0, 1]))


def test_compose_examples():
    z = np.zeros(3)
    assert np.allclose(bloch_compose(BlochDecomposition(z, z, np.zeros((3, 3)))), MIXED)
    assert np.allclose(bloch_compose(BlochDecomposition(z, z, -np.eye(3))), SINGLET_DM, atol=1e-15)
    with pytest.raises(NotAState) as info:
        bloch_compose(BlochDecomposition(z, z, np.eye(3)))
    assert info.value.eigenvalue == pytest.approx(-0.5)


def test_round_trip_random_states(hs_states):
    worst = 0.0
    for rho in hs_states:
        worst = max(worst, np.abs(bloch_compose(bloch_decompose(rho)) - rho).max())
    assert worst <= 1e-12


def test_decomposition_invariants(hs_states):
    for rho in hs_states[:200]:
        d = bloch_decompose(rho)
        assert np.linalg.norm(d.x) <= 1 + 1e-10
        assert np.linalg.norm(d.y) <= 1 + 1e-10
        assert np.linalg.svd(d.T, compute_uv=False).max() <= 1 + 1e-10


def test_marginal_bloch_vectors_match(hs_states):
    for rho in hs_states:
        d = bloch_decompose(rho)
        ra, rb = partial_trace(rho, "a"), partial_trace(rho, "b")
        xa = [np.trace(ra @ pauli(i)).real for i in (1, 2, 3)]
        yb = [np.trace(rb @ pauli(i)).real for i in (1, 2, 3)]
        assert np.allclose(d.x, xa, atol=1e-12)
        assert np.allclose(d.y, yb, atol=1e-12)


def test_partial_trace_examples():
    assert np.allclose(partial_trace(SINGLET_DM, "a"), np.eye(2) / 2)
    assert np.allclose(partial_trace(VV, "b"), np.diag([0, 1]))
    assert np.allclose(partial_trace(MIXED, "a"), np.eye(2) / 2)


def test_partial_trace_of_product_state(rng):
    a = random_state(rng, RandomStateMeasure("induced", 2))[:2, :2]
    a = a / np.trace(a)
    b = np.array([[0.7, 0.1j], [-0.1j, 0.3]])
    rho = np.kron(a, b)
    assert np.allclose(partial_trace(rho, "a"), a)
    assert np.allclose(partial_trace(rho, "b"), b)


def test_partial_transpose_examples(rng):
    assert np.allclose(partial_transpose(MIXED, "b"), MIXED)
    w = np.linalg.eigvalsh(partial_transpose(SINGLET_DM, "b"))
    assert np.allclose(w, [-0.5, 0.5, 0.5, 0.5])
    rho = random_state(rng)
    assert np.allclose(partial_transpose(partial_transpose(rho, "b"), "b"), rho)
    # transposing both factors is the full transpose
    assert np.allclose(partial_transpose(partial_transpose(rho, "a"), "b"), rho.T)


def test_partial_transpose_matches_index_definition(rng):
    rho = random_state(rng)
    r4 = rho.reshape(2, 2, 2, 2)
    expected = np.zeros((4, 4), dtype=complex)
    for i, j, k, l in itertools.product((0, 1), repeat=4):
        expected[2 * i + j, 2 * k + l] = r4[i, l, k, j]
    assert np.allclose(partial_transpose(rho, "b"), expected)


def test_family_endpoints():
    assert np.allclose(werner(1), SINGLET_DM)
    assert np.allclose(werner(0), MIXED)
    assert np.allclose(pure(0), VV)
    assert np.allclose(horodecki(0), werner(1))


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
def test_pure_family_is_pure(p):
    assert purity(pure(p)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("kind", ["werner", "horodecki", "pure"])
@pytest.mark.parametrize("p", [-0.1, 1.01])
def test_family_rejects_out_of_range(kind, p):
    with pytest.raises(InvalidArgument):
        make_family(StateFamily(kind, p))


@pytest.mark.parametrize("measure", [HAAR_PURE, HILBERT_SCHMIDT, RandomStateMeasure("induced", 2)])
def test_random_state_is_valid(measure, rng):
    for _ in range(100):
        rho = random_state(rng, measure)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.abs(rho - rho.conj().T).max() < 1e-12
        assert np.linalg.eigvalsh(rho)[0] >= -1e-10


def test_haar_draw_is_pure(rng):
    for _ in range(50):
        assert purity(random_state(rng, HAAR_PURE)) == pytest.approx(1.0, abs=1e-12)


# mean purity of 10^4 Hilbert-Schmidt draws from an independent pure-Python
# sampler (random.Random(12345), gauss real/imag parts); analytic value 8/17
HS_MEAN_PURITY = 0.47121945439340907


def test_hilbert_schmidt_mean_purity():
    g = np.random.default_rng(99)
    mean = np.mean([purity(random_state(g)) for _ in range(10_000)])
    assert mean == pytest.approx(HS_MEAN_PURITY, abs=0.01)


def test_measure_parsing():
    assert RandomStateMeasure.parse("induced:K=3") == RandomStateMeasure("induced", 3)
    assert RandomStateMeasure.parse("haar").columns == 1
    with pytest.raises(InvalidArgument):
        RandomStateMeasure.parse("induced:K=0")
    with pytest.raises(InvalidArgument):
        RandomStateMeasure.parse("bures")


def test_tensor_identity_perm_is_kron(rng):
    a, b = random_state(rng), random_state(rng)
    assert np.array_equal(tensor_and_permute(a, b, (0, 1, 2, 3)), np.kron(a, b))


def test_tensor_swap_twice(rng):
    a, b = random_state(rng), random_state(rng)
    swap = (0, 2, 1, 3)
    once = tensor_and_permute(a, b, swap)
    twice = once.reshape((2,) * 8).transpose([0, 2, 1, 3, 4, 6, 5, 7]).reshape(16, 16)
    assert np.allclose(twice, np.kron(a, b))


def test_tensor_moves_qubits_where_asked():
    # |0> on slot 0, |1> elsewhere: after perm the |0> must sit in slot perm[0]
    ket = {0: np.array([1, 0]), 1: np.array([0, 1])}
    for perm in itertools.permutations(range(4)):
        r1 = np.outer(np.kron(ket[0], ket[1]), np.kron(ket[0], ket[1]))
        r2 = np.outer(np.kron(ket[1], ket[1]), np.kron(ket[1], ket[1]))
        out = tensor_and_permute(r1, r2, perm)
        bits = [1, 1, 1, 1]
        bits[perm[0]] = 0
        idx = int("".join(map(str, bits)), 2)
        assert out[idx, idx] == pytest.approx(1.0)


@settings(max_examples=30, deadline=None)
@given(perm=st.permutations(range(4)), seed=st.integers(0, 2**32 - 1))
def test_tensor_preserves_spectrum_and_trace(perm, seed):
    g = np.random.default_rng(seed)
    a, b = random_state(g), random_state(g)
    out = tensor_and_permute(a, b, perm)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(out, out.conj().T)
    assert np.allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(np.kron(a, b)), atol=1e-12)


def test_tensor_rejects_bad_perm():
    with pytest.raises(InvalidArgument):
        tensor_and_permute(MIXED, MIXED, (0, 0, 1, 2))
