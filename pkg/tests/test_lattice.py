import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_form

from torelli_cert.errors import ParameterError
from torelli_cert.lattice import F2Span, IntegerLattice, elementary_divisors


def sympy_divisors(rows):
    S = smith_normal_form(Matrix(rows), domain=ZZ)
    return sorted(abs(S[i, i]) for i in range(min(S.shape)) if S[i, i])


matrices = st.integers(1, 6).flatmap(
    lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c),
                       min_size=1, max_size=7))


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_divisors_match_sympy(rows):
    divs = elementary_divisors(rows)
    assert divs == sympy_divisors(rows)
    assert all(divs[i + 1] % divs[i] == 0 for i in range(len(divs) - 1))


@settings(max_examples=300, deadline=None)
@given(matrices)
def test_hermite_basis_spans_same_lattice(rows):
    lat = IntegerLattice(len(rows[0]))
    lat.extend(rows)
    assert all(lat.contains(r) for r in rows)
    assert elementary_divisors(lat.basis()) == sympy_divisors(rows)
    # the reduced basis is echelon with positive pivots
    for p, row in lat.rows.items():
        assert row[p] > 0 and not any(row[:p])


def test_add_reports_growth():
    lat = IntegerLattice(3)
    assert lat.add([2, 0, 0])
    assert not lat.add([4, 0, 0])
    assert lat.add([3, 0, 0])  # gcd drops to 1
    assert lat.rows[0][0] == 1
    assert not lat.add([-7, 0, 0])
    assert lat.add([0, 0, 5])
    assert lat.rank == 2


def test_permutation_and_sign_invariance():
    rows = [[2, 4, 6], [1, 1, 0], [0, 3, 3]]
    base = elementary_divisors(rows)
    assert elementary_divisors(rows[::-1]) == base
    assert elementary_divisors([[-x for x in rows[0]]] + rows[1:]) == base


def test_bad_dimensions():
    with pytest.raises(ParameterError):
        IntegerLattice(0)
    with pytest.raises(ParameterError):
        IntegerLattice(2).add([1, 2, 3])


def test_f2span():
    s = F2Span(4)
    assert s.add(0b0011)
    assert s.add(0b0110)
    assert not s.add(0b0101)
    assert s.rank == 2
    assert s.contains(0b0101) and not s.contains(0b1000)
