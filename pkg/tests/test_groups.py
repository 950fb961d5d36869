import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpres.errors import (
    DegenerateSystemError,
    InconsistentSystemError,
    InvalidInputError,
)
from fpres.groups import (
    CharacterTable,
    CosetPresentation,
    FiniteAbelianGroup,
    MultGroup,
    SubgroupCharacters,
    TwistSystem,
    abelian_basis,
    cocycle_phases,
    congruence_solution_set,
    coordinate_map,
    decompose,
    is_nondegenerate,
    lifted_characters,
    rebase_phases,
    smith_normal_form,
    solve_congruence_system,
    span,
    with_representatives,
)
from fpres.phases import norm1, unit

small_orders = st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=3)


# ---------------------------------------------------------------------------
# vector groups and characters


@given(small_orders, st.data())
def test_group_laws(orders, data):
    g = decompose(orders)
    elems = list(g.elements())
    x = data.draw(st.sampled_from(elems))
    y = data.draw(st.sampled_from(elems))
    z = data.draw(st.sampled_from(elems))
    assert g.add(x, g.identity) == x
    assert g.add(x, g.neg(x)) == g.identity
    assert g.add(g.add(x, y), z) == g.add(x, g.add(y, z))
    assert g.add(x, y) == g.add(y, x)


@given(small_orders, st.data())
def test_order_of_matches_brute_force(orders, data):
    g = decompose(orders)
    x = data.draw(st.sampled_from(list(g.elements())))
    n, y = 1, x
    while y != g.identity:
        y = g.add(y, x)
        n += 1
    assert g.order_of(x) == n
    assert g.exponent() % n == 0


@pytest.mark.parametrize("orders", [(2,), (3,), (4,), (2, 2), (2, 4), (6, 2)])
def test_character_table_orthogonality(orders):
    g = decompose(orders)
    m = CharacterTable(g).matrix()
    assert np.allclose(m @ m.conj().T, g.size * np.eye(g.size), atol=1e-12)


@given(small_orders, st.data())
def test_character_group_law_exact(orders, data):
    g = decompose(orders)
    elems = list(g.elements())
    tab = CharacterTable(g)
    lab = data.draw(st.sampled_from(elems))
    x = data.draw(st.sampled_from(elems))
    y = data.draw(st.sampled_from(elems))
    assert tab.exponent(lab, g.add(x, y)) == norm1(
        tab.exponent(lab, x) + tab.exponent(lab, y)
    )


def test_group_rejects_bad_orders():
    with pytest.raises(InvalidInputError):
        decompose([0, 2])
    g = decompose([2, 3])
    with pytest.raises(InvalidInputError):
        g.check((2, 0))


# ---------------------------------------------------------------------------
# generic basis extraction


@pytest.mark.parametrize(
    "orders,expected",
    [
        ((4,), (4,)),
        ((2, 2), (2, 2)),
        ((2, 4), (4, 2)),
        ((6,), (6,)),
        ((2, 3), (6,)),
        ((4, 6), (12, 2)),
        ((2, 2, 2), (2, 2, 2)),
    ],
)
def test_abelian_basis_invariant_factors(orders, expected):
    g = decompose(orders)
    basis, fac = abelian_basis(list(g.elements()), g.add, g.identity)
    assert tuple(fac) == expected
    for a, b in zip(fac, fac[1:]):
        assert a % b == 0
    coords = coordinate_map(basis, fac, g.add, g.identity)
    assert len(coords) == g.size


def test_span_closure():
    g = decompose([4, 2])
    sub = span([(2, 0), (0, 1)], g.add, g.identity)
    assert sub == [(0, 0), (0, 1), (2, 0), (2, 1)]


def test_mult_group_units_mod_15():
    # (Z/15)^* is Z_4 x Z_2
    elems = [k for k in range(15) if np.gcd(k, 15) == 1]
    g = MultGroup(elems, lambda a, b: a * b % 15, 1)
    assert tuple(g.orders) == (4, 2)
    assert g.exponent() == 4
    assert g.order_of(2) == 4
    assert g.inverse(2) == 8
    assert g.power(7, 2) == 4
    labels = list(g.char_labels())
    m = np.array(
        [[g.char_value(lab, x) for x in g.elements] for lab in labels]
    )
    assert np.allclose(m @ m.conj().T, g.size * np.eye(g.size), atol=1e-12)


def test_mult_group_subgroup():
    elems = [k for k in range(15) if np.gcd(k, 15) == 1]
    g = MultGroup(elems, lambda a, b: a * b % 15, 1)
    assert g.subgroup([4]) == (1, 4)
    assert g.subgroup([2]) == (1, 2, 4, 8)


# ---------------------------------------------------------------------------
# coset presentations


def test_coset_presentation_z4_mod_z2():
    g = decompose([4])
    pres = CosetPresentation(g, [(2,)])
    assert pres.class_orders == (2,)
    assert pres.basis_reps == ((1,),)
    assert pres.closure(0) == (2,)
    assert pres.discrepancy((1,), (1,)) == (2,)
    assert pres.discrepancy((0,), (1,)) == (0,)
    assert pres.class_of((3,)) == (1,)
    assert pres.subgroup_part((3,)) == (2,)


@pytest.mark.parametrize(
    "orders,gens",
    [
        ((4,), [(2,)]),
        ((2, 2, 2), [(1, 1, 0)]),
        ((4, 2), [(2, 1)]),
        ((6, 2), [(3, 1)]),
        ((8,), [(4,)]),
        ((9, 3), [(3, 0)]),
    ],
)
def test_representative_map_is_multiplicative(orders, gens):
    g = decompose(orders)
    pres = CosetPresentation(g, gens)
    assert pres.num_classes * len(pres.subgroup) == g.size
    for m in pres.class_labels():
        for k in pres.class_labels():
            mk = tuple((a + b) % n for a, b, n in zip(m, k, pres.class_orders))
            lhs = g.add(pres.representative(m), pres.representative(k))
            rhs = g.add(pres.representative(mk), pres.discrepancy(m, k))
            assert lhs == rhs
    for x in g.elements():
        cls = pres.class_of(x)
        assert x == g.add(pres.representative(cls), pres.subgroup_part(x))


def test_with_representatives_validates_class():
    g = decompose([4])
    pres = CosetPresentation(g, [(2,)])
    alt = with_representatives(pres, [(3,)])
    assert alt.basis_reps == ((3,),)
    with pytest.raises(InvalidInputError):
        with_representatives(pres, [(2,)])


# ---------------------------------------------------------------------------
# cocycle phases and lifted characters


def test_cocycle_phase_z4_example():
    # H = {0,2} inside Z_4; the nontrivial subgroup character has
    # Psi(closure) = -1 and the principal square root gives phi = i
    g = decompose([4])
    pres = CosetPresentation(g, [(2,)])
    chars = SubgroupCharacters(g, pres.subgroup)
    coc = cocycle_phases(pres, chars)
    assert coc.phi_exponent((1,), (1,)) == Fraction(1, 4)
    assert coc.phi((1,), (1,)) == pytest.approx(1j)
    assert coc.phi_exponent((0,), (1,)) == 0
    assert coc.check_cocycle_law() == 0


def test_rebase_differs_from_reseed():
    # moving the representative 1 -> 3 multiplies phi by Psi(2) = -1;
    # re-deriving principal roots for the new closure would give +i again
    g = decompose([4])
    pres = CosetPresentation(g, [(2,)])
    chars = SubgroupCharacters(g, pres.subgroup)
    coc = cocycle_phases(pres, chars)
    alt = with_representatives(pres, [(3,)])
    moved = rebase_phases(coc, alt)
    assert moved.phi_exponent((1,), (1,)) == Fraction(3, 4)
    assert moved.check_cocycle_law() == 0
    reseeded = cocycle_phases(alt, chars)
    assert reseeded.phi_exponent((1,), (1,)) == Fraction(1, 4)
    assert reseeded.check_cocycle_law() == 0


def _random_pair(rng):
    while True:
        orders = tuple(
            rng.choice([2, 3, 4, 6, 8]) for _ in range(rng.randint(1, 3))
        )
        g = decompose(orders)
        if not 4 <= g.size <= 64:
            continue
        for _ in range(40):
            gens = [
                tuple(rng.randrange(n) for n in orders)
                for _ in range(rng.randint(1, 2))
            ]
            sub = span(gens, g.add, g.identity)
            if 1 < len(sub) < g.size:
                return g, gens


@pytest.mark.parametrize("seed", range(12))
def test_lifted_characters_random_pairs(seed):
    rng = random.Random(seed)
    g, gens = _random_pair(rng)
    pres = CosetPresentation(g, gens)
    chars = SubgroupCharacters(g, pres.subgroup)
    lift = lifted_characters(cocycle_phases(pres, chars))
    assert len(lift.labels) == g.size
    m = lift.matrix()
    # orthogonality and completeness
    assert np.allclose(m @ m.conj().T, g.size * np.eye(g.size), atol=1e-12)
    # multiplicative on the nose, as exact exponents
    elems = list(g.elements())
    for lab in lift.labels[:: max(1, len(lift.labels) // 6)]:
        for _ in range(8):
            x = elems[rng.randrange(len(elems))]
            y = elems[rng.randrange(len(elems))]
            assert lift.exponent(lab, g.add(x, y)) == norm1(
                lift.exponent(lab, x) + lift.exponent(lab, y)
            )
    # restriction to the subgroup forgets the coset and cocycle parts
    for (mc, i) in lift.labels:
        if any(mc):
            continue
        for h in pres.subgroup:
            assert lift.exponent((mc, i), h) == chars.exponent(i, h)


# ---------------------------------------------------------------------------
# Smith reduction and the congruence solver


@pytest.mark.parametrize("seed", range(10))
def test_smith_normal_form_random(seed):
    rng = random.Random(100 + seed)
    m = rng.randint(1, 4)
    n = rng.randint(1, 4)
    a = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
    d, u, v = smith_normal_form(a)
    ua = [[sum(u[i][k] * a[k][j] for k in range(m)) for j in range(n)] for i in range(m)]
    uav = [[sum(ua[i][k] * v[k][j] for k in range(n)) for j in range(n)] for i in range(m)]
    assert uav == d
    for i in range(m):
        for j in range(n):
            if i != j:
                assert d[i][j] == 0
    diag = [d[i][i] for i in range(min(m, n)) if d[i][i]]
    for x, y in zip(diag, diag[1:]):
        assert y % x == 0
    assert abs(round(np.linalg.det(np.array(u, dtype=float)))) == 1
    assert abs(round(np.linalg.det(np.array(v, dtype=float)))) == 1


def test_congruence_two_generator_example():
    sys = TwistSystem(
        orders=(2, 2),
        r=((0, 1), (1, 0)),
        p=(Fraction(1, 2), Fraction(0)),
    )
    assert is_nondegenerate(sys)
    assert solve_congruence_system(sys) == (0, 1)
    assert congruence_solution_set(sys) == [(0, 1)]


def test_congruence_single_generator_example():
    sys = TwistSystem(orders=(2,), r=((1,),), p=(Fraction(1, 2),))
    assert is_nondegenerate(sys)
    assert solve_congruence_system(sys) == (1,)
    assert congruence_solution_set(sys) == [(1,)]


def test_congruence_degenerate_and_inconsistent():
    sys = TwistSystem(orders=(2,), r=((0,),), p=(Fraction(1, 2),))
    assert not is_nondegenerate(sys)
    with pytest.raises(DegenerateSystemError):
        solve_congruence_system(sys)
    with pytest.raises(InconsistentSystemError):
        solve_congruence_system(sys, require_nondegenerate=False)


def test_congruence_trivial_system():
    sys = TwistSystem(orders=(), r=(), p=())
    assert solve_congruence_system(sys) == ()


def random_twist_system(rng, max_order=6):
    n = rng.randint(1, 3)
    orders = tuple(rng.choice([2, 2, 3, 4, max_order]) for _ in range(n))
    r = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            nij = np.gcd(orders[i], orders[j])
            r[i][j] = rng.randrange(nij)
            r[j][i] = (-r[i][j]) % nij
        r[i][i] = rng.choice([0, orders[i] // 2]) if orders[i] % 2 == 0 else 0
    # build p from a known solution so the system is consistent
    k0 = tuple(rng.randrange(o) for o in orders)
    sys0 = TwistSystem(tuple(orders), tuple(map(tuple, r)), (Fraction(0),) * n)
    p = tuple(norm1(-sys0.lhs_exponent(k0, i)) for i in range(n))
    return TwistSystem(tuple(orders), tuple(map(tuple, r)), p), k0


@pytest.mark.parametrize("seed", range(30))
def test_congruence_solver_vs_exhaustive(seed):
    rng = random.Random(1000 + seed)
    sys, _ = random_twist_system(rng)
    sols = congruence_solution_set(sys)
    assert sols, "constructed system must be solvable"
    if is_nondegenerate(sys):
        assert len(sols) == 1
        assert solve_congruence_system(sys) == sols[0]
    else:
        with pytest.raises(DegenerateSystemError):
            solve_congruence_system(sys)
        assert solve_congruence_system(sys, require_nondegenerate=False) == min(sols)


@pytest.mark.parametrize("seed", range(10))
def test_degenerate_solution_count_matches_annihilators(seed):
    # the solution set, when nonempty, is a torsor under the annihilator lattice
    rng = random.Random(2000 + seed)
    sys, _ = random_twist_system(rng, max_order=4)
    sols = congruence_solution_set(sys)
    ann = 0
    for k in itertools.product(*(range(o) for o in sys.orders)):
        if all(sys.lhs_exponent(k, i) == 0 for i in range(sys.n)):
            ann += 1
    assert len(sols) == ann
