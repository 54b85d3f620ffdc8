import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bulknmr import adjoint_generator, build_structure_table, commute, enumerate_basis, get_basis
from bulknmr.algebra import Axis, ProductOperator, commute_combination, parse_operator
from bulknmr.qoracle import realize


def op(name, n):
    return parse_operator(name, n)


def dense_commutator(a, b):
    """(A B - B A) / i from Kronecker matrices."""
    A, B = realize(a), realize(b)
    return (A @ B - B @ A) / 1j


def realize_combination(comb, n):
    out = np.zeros((2**n, 2**n), complex)
    for o, c in comb.items():
        out += float(c) * realize(o)
    return out


# basis ---------------------------------------------------------------------

@pytest.mark.parametrize("n, size", [(1, 3), (2, 15), (3, 63), (4, 255), (5, 1023), (6, 4095)])
def test_basis_size(n, size):
    assert len(enumerate_basis(n)) == size


def test_basis_order_n2():
    names = get_basis(2).names()
    assert names[:6] == ["S[1x]", "S[1y]", "S[1z]", "S[2x]", "S[2y]", "S[2z]"]
    assert names[6:9] == ["C[1x,2x]", "C[1x,2y]", "C[1x,2z]"]
    assert names[-1] == "C[1z,2z]"
    ranks = [o.rank for o in enumerate_basis(2)]
    assert ranks == [1] * 6 + [2] * 9


def test_basis_rank_major_and_deterministic():
    b1, b2 = enumerate_basis(4), enumerate_basis(4)
    assert b1 == b2
    ranks = [o.rank for o in b1]
    assert ranks == sorted(ranks)
    basis = get_basis(4)
    for j, o in enumerate(b1):
        assert basis.index(o) == j


@pytest.mark.parametrize("n", [0, -1, 11])
def test_basis_rejects_bad_n(n):
    with pytest.raises(ValueError):
        enumerate_basis(n)


def test_operator_names_round_trip():
    for o in enumerate_basis(3):
        assert parse_operator(o.name, 3) == o


@pytest.mark.parametrize("text", ["S[1x,2y]", "C[1x]", "S[3x]", "X[1x]", "C[2x,1y]", "S[1w]"])
def test_parse_operator_rejects(text):
    with pytest.raises(ValueError):
        parse_operator(text, 2)


# commutator examples --------------------------------------------------------

def test_commute_su2():
    sx, sy, sz = (op(f"S[1{a}]", 1) for a in "xyz")
    assert commute(sx, sy) == {sz: 1}
    assert commute(sy, sz) == {sx: 1}
    assert commute(sz, sx) == {sy: 1}


def test_commute_self_is_empty():
    c = op("C[1x,2x]", 2)
    assert commute(c, c) == {}


def test_commute_two_rank2():
    assert commute(op("C[1x,2y]", 2), op("C[1x,2z]", 2)) == {op("S[2x]", 2): Fraction(1, 4)}


def test_commute_rank2_with_rank1():
    assert commute(op("C[1x,2x]", 2), op("S[1z]", 2)) == {op("C[1y,2x]", 2): -1}


def test_commute_mismatched_n():
    with pytest.raises(ValueError):
        commute(op("S[1x]", 1), op("S[1x]", 2))


def test_coefficients_are_dyadic():
    table = build_structure_table(3)
    for comb in table.entries.values():
        for c in comb.values():
            d = c.denominator
            assert d & (d - 1) == 0 and abs(c.numerator) == 1


# properties -----------------------------------------------------------------

@pytest.mark.parametrize("n", [1, 2, 3])
def test_table_matches_dense_oracle(n):
    basis = enumerate_basis(n)
    table = build_structure_table(n)
    for j, a in enumerate(basis):
        for k, b in enumerate(basis):
            expected = dense_commutator(a, b)
            got = realize_combination({basis[l]: c for l, c in table.commutator(j, k).items()}, n)
            np.testing.assert_allclose(got, expected, atol=1e-12)


def test_sampled_n4_matches_dense_oracle():
    rng = np.random.default_rng(4)
    basis = enumerate_basis(4)
    for _ in range(300):
        a, b = (basis[i] for i in rng.integers(len(basis), size=2))
        np.testing.assert_allclose(realize_combination(commute(a, b), 4), dense_commutator(a, b), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_antisymmetry(n):
    basis = enumerate_basis(n)
    for a, b in itertools.product(basis, repeat=2):
        assert commute(a, b) == {o: -c for o, c in commute(b, a).items()}


def jacobi(a, b, c):
    total = {}
    for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
        inner = commute(y, z)
        for o, coeff in commute_combination({x: 1}, inner).items():
            total[o] = total.get(o, 0) + coeff
    return {o: v for o, v in total.items() if v != 0}


def test_jacobi_all_triples_n2():
    basis = enumerate_basis(2)
    for a, b, c in itertools.product(basis, repeat=3):
        assert jacobi(a, b, c) == {}


@pytest.mark.parametrize("n", [3, 4])
def test_jacobi_sampled(n):
    rng = np.random.default_rng(100 + n)
    basis = enumerate_basis(n)
    for idx in rng.integers(len(basis), size=(2000, 3)):
        assert jacobi(*(basis[i] for i in idx)) == {}


@pytest.mark.parametrize("n", [2, 3])
def test_rank1_closes_per_nucleus(n):
    for p in range(1, n + 1):
        ops = [op(f"S[{p}{a}]", n) for a in "xyz"]
        for a, b in itertools.product(ops, repeat=2):
            assert set(commute(a, b)) <= set(ops)
        for q in range(1, n + 1):
            if q != p:
                assert commute(ops[0], op(f"S[{q}y]", n)) == {}


def test_table_sizes():
    t1 = build_structure_table(1)
    assert len(t1.entries) == 3
    # unordered noncommuting pairs, counted from the dense matrices
    assert build_structure_table(2).nonzero_count() == 60
    assert build_structure_table(3).nonzero_count() == 1008


def test_lazy_table_matches_eager():
    eager = build_structure_table(3, eager=True)
    lazy = build_structure_table(3, eager=False)
    assert lazy.entries == eager.entries


# generator ------------------------------------------------------------------

def test_generator_zero_hamiltonian():
    A = adjoint_generator(build_structure_table(2), np.zeros(15))
    assert A.nnz == 0 and A.shape == (15, 15)


def test_generator_length_mismatch():
    with pytest.raises(ValueError):
        adjoint_generator(build_structure_table(2), np.zeros(14))


def test_generator_precession_row():
    w = 2.5
    A = adjoint_generator(build_structure_table(1), [0.0, 0.0, -w]).toarray()
    # d<Sx>/dt = w <Sy>, d<Sy>/dt = -w <Sx>
    np.testing.assert_array_equal(A, [[0, w, 0], [-w, 0, 0], [0, 0, 0]])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_generator_weighted_antisymmetric(n, seed):
    rng = np.random.default_rng(seed)
    basis = get_basis(n)
    h = rng.normal(size=len(basis)) * (rng.random(len(basis)) < 0.3)
    A = adjoint_generator(build_structure_table(n), h).toarray()
    W = np.diag(4.0 ** basis.ranks)
    np.testing.assert_allclose(W @ A, -(W @ A).T, atol=1e-12)


def test_generator_matches_heisenberg_dense():
    # dB_j/dt = i [H, B_j]; project with Tr(B_k X) 4**rank / 2**n
    rng = np.random.default_rng(7)
    n = 2
    basis = enumerate_basis(n)
    h = rng.normal(size=len(basis))
    A = adjoint_generator(build_structure_table(n), h).toarray()
    H = sum(c * realize(o) for c, o in zip(h, basis))
    for j, b in enumerate(basis):
        D = 1j * (H @ realize(b) - realize(b) @ H)
        row = [np.trace(realize(o) @ D).real * 4**o.rank / 2**n for o in basis]
        np.testing.assert_allclose(A[j], row, atol=1e-12)


def test_axis_parse():
    assert Axis.parse("y") is Axis.Y and Axis.parse(3) is Axis.Z
    assert ProductOperator(2, ((1, "x"), (2, "z"))).name == "C[1x,2z]"
