import math
from fractions import Fraction

import numpy as np
import pytest

from fpres.currents import (
    FixedPointBundle,
    Theory,
    bundle_from_document,
    bundle_to_document,
    detect_simple_currents,
    solve_1x1_bundle,
)
from fpres.errors import InvalidInputError, MalformedBundleError
from fpres.modular import tensor
from fpres.phases import norm1
from fpres.wzw import ising, su2, sun


def test_detect_su2_4():
    assert detect_simple_currents(su2(4)) == [0, 4]


def test_detect_ising():
    md = ising()
    assert detect_simple_currents(md) == [0, md.index("psi")]


def test_detect_su5():
    md = sun(5, 5)
    ids = detect_simple_currents(md)
    assert len(ids) == 5
    assert md.index((5, 0, 0, 0)) in ids
    assert md.index((0, 0, 0, 5)) in ids


def test_su2_4_current_action():
    th = Theory(su2(4))
    j = 4
    assert th.current_order(j) == 2
    assert [th.apply(j, a) for a in range(5)] == [4, 3, 2, 1, 0]
    assert th.current_h(j) == Fraction(1)
    charges = [th.charge_exponent(j, a) for a in range(5)]
    assert charges == [0, Fraction(1, 2), 0, Fraction(1, 2), 0]
    assert [a for a in range(5) if th.is_local(j, a)] == [0, 2, 4]


def test_su5_center_is_z5():
    th = Theory(sun(5, 5))
    assert tuple(th.center.orders) == (5,)
    j = th.md.index((5, 0, 0, 0))
    assert th.current_order(j) == 5
    assert th.center.power(j, 4) == th.md.index((0, 0, 0, 5))
    f = th.md.index((1, 1, 1, 1))
    assert th.apply(j, f) == f
    assert th.charge_exponent(j, f) == 0


def test_su2_4_bundle_closed_form():
    th = Theory(su2(4))
    b = th.bundle(4)
    assert b.fields == (2,)
    assert b.matrix[0, 0] == pytest.approx(1j)
    assert b.eta[0] == pytest.approx(-1)


def test_su2_2_bundle_closed_form():
    th = Theory(su2(2))
    b = th.bundle(2)
    assert b.fields == (1,)
    assert b.matrix[0, 0] == pytest.approx(np.exp(-3j * np.pi / 4))


def test_ising_bundle_closed_form():
    md = ising()
    th = Theory(md)
    psi = md.index("psi")
    b = th.bundle(psi)
    assert b.fields == (md.index("sigma"),)
    assert b.matrix[0, 0] == pytest.approx(np.exp(-1j * np.pi / 4))
    assert b.eta[0] == pytest.approx(-1j)


def test_solve_1x1_bundle_satisfies_torus_relation():
    t = Fraction(5, 24)
    mat, eta = solve_1x1_bundle(t)
    tv = np.exp(2j * np.pi * float(t))
    s = mat[0, 0]
    assert (s * tv) ** 3 == pytest.approx(s * s)
    assert abs(s) == pytest.approx(1)
    assert eta[0] == pytest.approx(s * s)


@pytest.mark.parametrize("k", [2, 4, 6, 8])
def test_self_twist_is_current_spin(k):
    # F(a, J, J) at the fixed field equals exp(2 pi i h_J), i.e. (-1)^(k/2)
    th = Theory(su2(k))
    a = k // 2
    f = th.twist_value(a, k, k)
    assert f == pytest.approx((-1) ** (k // 2))
    assert th.twist_exponent(a, k, k) == norm1(th.current_h(k))


def test_ising_self_twist():
    md = ising()
    th = Theory(md)
    psi = md.index("psi")
    sig = md.index("sigma")
    assert th.twist_value(sig, psi, psi) == pytest.approx(-1)


def test_product_center_and_integer_spin_filter():
    md = tensor(su2(2), su2(2))
    th = Theory(md)
    assert th.center.elements == (0, 2, 6, 8)
    assert th.integer_spin_currents() == (0, 8)


def test_product_bundle_kron():
    md = tensor(su2(4), su2(4))
    th = Theory(md)
    b = th.bundle(20)  # current (4, 0)
    assert b.fields == tuple(10 + i for i in range(5))
    base = su2(4).s
    assert np.allclose(b.matrix, 1j * base, atol=1e-12)
    assert np.allclose(b.eta, -np.ones(5), atol=1e-12)
    # block lookup respects support positions
    blk = th.bundle_block(20, [12, 10], [14])
    assert blk[0, 0] == pytest.approx(1j * base[2, 4])
    assert blk[1, 0] == pytest.approx(1j * base[0, 4])


def test_twist_extraction_on_wide_bundle():
    # su2(2) x su2(2), current J = (2,0), K = (2,2): the K-translated rows
    # of S^J pick up the factor self-twist -1
    md = tensor(su2(2), su2(2))
    th = Theory(md)
    a = md.index((1, 1))
    j = md.index((2, 0))
    k = md.index((2, 2))
    assert th.bundle(j).dim == 3
    assert th.twist_exponent(a, k, j) == Fraction(1, 2)
    # against the other factor current the twist is trivial
    assert th.twist_exponent(a, md.index((0, 2)), j) == 0


def test_untwisted_stabilizer_contrast():
    md = tensor(su2(2), su2(2))
    th = Theory(md)
    a = md.index((1, 1))
    full = th.center.elements
    assert th.stabilizer(a, full) == (0, 2, 6, 8)
    # every nontrivial current is twisted against some stabilizer member
    assert th.untwisted_stabilizer(a, full) == (0,)
    # inside the diagonal subgroup everything is untwisted
    diag = th.subgroup([8])
    assert th.untwisted_stabilizer(a, diag) == (0, 8)


def test_stabilizer_triple_product():
    md = tensor(su2(4), su2(6), su2(2))
    th = Theory(md)
    h_gen = md.index((4, 6, 2))
    assert h_gen == 104
    sub = th.subgroup([h_gen])
    assert sub == (0, 104)
    a = md.index((2, 1, 1))
    assert a == 46
    assert th.stabilizer(a, sub) == (0,)


def test_bundle_document_roundtrip():
    md = tensor(su2(4), su2(4))
    th = Theory(md)
    b = th.bundle(20)
    doc = bundle_to_document(md, b)
    assert doc["format"] == "fp-bundle v1"
    back = bundle_from_document(md, doc)
    assert back.current == b.current
    assert back.fields == b.fields
    assert np.allclose(back.matrix, b.matrix, atol=0)
    assert np.allclose(back.eta, b.eta, atol=0)


def test_bundle_document_rejects_garbage():
    md = su2(4)
    with pytest.raises(MalformedBundleError):
        bundle_from_document(md, {"format": "nope"})
    with pytest.raises(MalformedBundleError):
        bundle_from_document(
            md, {"format": "fp-bundle v1", "current": 4, "fields": [2]}
        )


def test_theory_rejects_bad_extra_bundles():
    md = su2(4)
    good = FixedPointBundle(4, (2,), np.array([[1j]]), np.array([-1 + 0j]))
    th = Theory(md, extra_bundles=[good])
    assert th.bundle(4) is good
    with pytest.raises(MalformedBundleError):
        Theory(
            md,
            extra_bundles=[
                FixedPointBundle(4, (1,), np.array([[1j]]), None)
            ],
        )
    with pytest.raises(InvalidInputError):
        Theory(
            md,
            extra_bundles=[
                FixedPointBundle(1, (1,), np.array([[1j]]), None)
            ],
        )


def test_identity_bundle_block_is_s():
    md = su2(4)
    th = Theory(md)
    assert np.allclose(
        th.bundle_block(0, [0, 2], [1, 3]), md.s[np.ix_([0, 2], [1, 3])]
    )
