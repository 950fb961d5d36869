"""Finite abelian groups, characters, coset presentations and phase cocycles.

Three views of the same algebra live here:

* vector groups Z_{N_1} x ... x Z_{N_r} with elements as int tuples,
* opaque-element groups (``MultGroup``) whose product is supplied by a
  callable, used for fusion subgroups of field ids,
* coset presentations G/H with multiplicative representative maps and the
  phase data needed to lift subgroup characters to the ambient group.

The congruence solver at the bottom picks representatives that are
untwisted against a generating set; it works over exact rationals.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateSystemError,
    InconsistentSystemError,
    InvalidInputError,
)
from .phases import norm1, principal_root_exp, unit

Vec = tuple[int, ...]


# ---------------------------------------------------------------------------
# vector groups


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Product of cyclic groups with fixed factor orders."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if any(n < 1 for n in self.orders):
            raise InvalidInputError(f"orders must be >= 1, got {self.orders}")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def size(self) -> int:
        out = 1
        for n in self.orders:
            out *= n
        return out

    @property
    def identity(self) -> Vec:
        return (0,) * len(self.orders)

    def check(self, x: Vec) -> Vec:
        if len(x) != len(self.orders) or any(
            not (0 <= xi < n) for xi, n in zip(x, self.orders)
        ):
            raise InvalidInputError(f"{x} is not an element of Z{self.orders}")
        return x

    def add(self, x: Vec, y: Vec) -> Vec:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x: Vec) -> Vec:
        return tuple((-a) % n for a, n in zip(x, self.orders))

    def scale(self, k: int, x: Vec) -> Vec:
        return tuple((k * a) % n for a, n in zip(x, self.orders))

    def order_of(self, x: Vec) -> int:
        out = 1
        for a, n in zip(x, self.orders):
            if a:
                out = _lcm(out, n // _gcd(n, a))
        return out

    def exponent(self) -> int:
        out = 1
        for n in self.orders:
            out = _lcm(out, n)
        return out

    def elements(self):
        return itertools.product(*(range(n) for n in self.orders))


def decompose(orders) -> FiniteAbelianGroup:
    """Build the canonical product group with the given cyclic factors."""
    return FiniteAbelianGroup(tuple(int(n) for n in orders))


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _lcm(a: int, b: int) -> int:
    return a * b // _gcd(a, b) if a and b else 0


def lcm_all(values) -> int:
    out = 1
    for v in values:
        out = _lcm(out, int(v))
    return out


# ---------------------------------------------------------------------------
# characters of a vector group


@dataclass(frozen=True)
class CharacterTable:
    """Characters chi_i(h) = exp(2 pi i sum_l i_l h_l / N_l) of a vector group.

    Labels live in the same vector space as the elements.
    """

    group: FiniteAbelianGroup

    def exponent(self, label: Vec, elem: Vec) -> Fraction:
        q = Fraction(0)
        for i, h, n in zip(label, elem, self.group.orders):
            q += Fraction(i * h, n)
        return norm1(q)

    def value(self, label: Vec, elem: Vec) -> complex:
        return unit(self.exponent(label, elem))

    def matrix(self) -> np.ndarray:
        elems = list(self.group.elements())
        out = np.empty((len(elems), len(elems)), dtype=complex)
        for r, lab in enumerate(elems):
            for c, el in enumerate(elems):
                out[r, c] = self.value(lab, el)
        return out


def characters(group: FiniteAbelianGroup) -> CharacterTable:
    return CharacterTable(group)


# ---------------------------------------------------------------------------
# generic decomposition of a small abelian group


def span(gens, add, zero):
    """Closure of a generating set; returns a sorted list."""
    seen = {zero}
    frontier = [zero]
    gens = list(gens)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = add(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return sorted(seen)


def _element_order(x, add, zero):
    n, y = 1, x
    while y != zero:
        y = add(y, x)
        n += 1
    return n


def abelian_basis(elements, add, zero):
    """Cyclic basis (descending orders, lexicographic tie-breaks) of a finite
    abelian group given by an explicit element list.

    Returns (basis_elements, orders). The first basis element realizes the
    group exponent; the rest are recursive lifts from the quotient, adjusted
    so that each lift's order matches its class order.
    """
    elems = sorted(elements)
    if len(elems) == 1:
        return [], []
    orders = {x: _element_order(x, add, zero) for x in elems}
    expo = max(orders.values())
    g1 = min(x for x in elems if orders[x] == expo)
    sub = span([g1], add, zero)
    if len(sub) == len(elems):
        return [g1], [expo]

    sub_set = set(sub)
    canon: dict = {}
    for x in elems:
        canon[x] = min(add(x, h) for h in sub)
    q_elems = sorted(set(canon.values()))
    q_add = lambda a, b: canon[add(a, b)]
    q_zero = canon[zero]
    q_basis, q_orders = abelian_basis(q_elems, q_add, q_zero)

    basis, out_orders = [g1], [expo]
    for qb, qn in zip(q_basis, q_orders):
        # lift: coset member whose order in the parent equals the class order
        lift = min(y for y in (add(qb, h) for h in sub) if orders[y] == qn)
        basis.append(lift)
        out_orders.append(qn)
    return basis, out_orders


def coordinate_map(basis, orders, add, zero):
    """Map each group element to its exponent vector over the basis.

    Raises if the candidate basis does not span freely (sanity guard).
    """
    coords = {}
    for vec in itertools.product(*(range(n) for n in orders)):
        x = zero
        for m, b in zip(vec, basis):
            for _ in range(m):
                x = add(x, b)
        if x in coords:
            raise InvalidInputError("candidate basis is not free")
        coords[x] = vec
    return coords


class MultGroup:
    """Small abelian group over opaque (sortable) element ids.

    The product is supplied as a callable; basis, coordinates and characters
    are derived eagerly. Intended for groups of at most a few hundred
    elements (fusion subgroups, stabilizers, coset classes).
    """

    def __init__(self, elements, mul, identity):
        self.elements = tuple(sorted(elements))
        self._mul = mul
        self.identity = identity
        if identity not in set(self.elements):
            raise InvalidInputError("identity not in element list")
        self.basis, self.orders = abelian_basis(self.elements, mul, identity)
        self.coords = coordinate_map(self.basis, self.orders, mul, identity)
        if len(self.coords) != len(self.elements):
            raise InvalidInputError("element list is not closed under product")

    @property
    def size(self) -> int:
        return len(self.elements)

    def mul(self, x, y):
        return self._mul(x, y)

    def power(self, x, k: int):
        out, y, k = self.identity, x, k % self.order_of(x)
        for _ in range(k):
            out = self._mul(out, y)
        return out

    def inverse(self, x):
        return self.power(x, self.order_of(x) - 1)

    def order_of(self, x) -> int:
        return _element_order(x, self._mul, self.identity)

    def exponent(self) -> int:
        return lcm_all(self.orders) if self.orders else 1

    def subgroup(self, gens):
        return tuple(span(gens, self._mul, self.identity))

    def char_labels(self):
        return itertools.product(*(range(n) for n in self.orders))

    def char_exponent(self, label, x) -> Fraction:
        v = self.coords[x]
        q = Fraction(0)
        for i, m, n in zip(label, v, self.orders):
            q += Fraction(i * m, n)
        return norm1(q)

    def char_value(self, label, x) -> complex:
        return unit(self.char_exponent(label, x))


# ---------------------------------------------------------------------------
# coset presentations


class CosetPresentation:
    """Quotient G/H with a multiplicative representative map.

    Classes are labelled by exponent vectors over a cyclic basis of the
    quotient (orders descending). The representative of a product of basis
    classes is the product of basis representatives, so discrepancies
    R(J)R(K) = R(JK) h(J,K) factor over the cyclic factors.
    """

    def __init__(self, ambient: FiniteAbelianGroup, subgroup_gens, basis_reps=None):
        self.ambient = ambient
        gens = [ambient.check(tuple(g)) for g in subgroup_gens]
        self.subgroup = tuple(span(gens, ambient.add, ambient.identity))
        self._sub_set = set(self.subgroup)

        add, zero = ambient.add, ambient.identity
        canon: dict[Vec, Vec] = {}
        for x in ambient.elements():
            canon[x] = min(add(x, h) for h in self.subgroup)
        self._canon = canon
        q_elems = sorted(set(canon.values()))
        q_add = lambda a, b: canon[add(a, b)]
        q_zero = canon[zero]
        q_basis, q_orders = abelian_basis(q_elems, q_add, q_zero)
        self.class_orders = tuple(q_orders)
        if basis_reps is None:
            self.basis_reps = tuple(q_basis)
        else:
            basis_reps = tuple(ambient.check(tuple(r)) for r in basis_reps)
            if len(basis_reps) != len(q_basis):
                raise InvalidInputError("wrong number of basis representatives")
            for r, qb in zip(basis_reps, q_basis):
                if canon[r] != qb:
                    raise InvalidInputError(
                        f"representative {r} is not in the basis class of {qb}"
                    )
            self.basis_reps = basis_reps

        # class coordinates: quotient canonical member -> exponent vector
        q_coords = coordinate_map(q_basis, q_orders, q_add, q_zero)
        self._class_of_canon = q_coords

    @property
    def num_classes(self) -> int:
        out = 1
        for n in self.class_orders:
            out *= n
        return out

    def class_labels(self):
        return itertools.product(*(range(n) for n in self.class_orders))

    def class_of(self, g: Vec) -> Vec:
        return self._class_of_canon[self._canon[self.ambient.check(tuple(g))]]

    def representative(self, m: Vec) -> Vec:
        out = self.ambient.identity
        for k, r in zip(m, self.basis_reps):
            out = self.ambient.add(out, self.ambient.scale(k, r))
        return out

    def in_subgroup(self, g: Vec) -> bool:
        return tuple(g) in self._sub_set

    def subgroup_part(self, g: Vec) -> Vec:
        """h such that g = R(class(g)) h."""
        g = self.ambient.check(tuple(g))
        h = self.ambient.add(g, self.ambient.neg(self.representative(self.class_of(g))))
        if h not in self._sub_set:
            raise InvalidInputError("representative map is inconsistent")
        return h

    def closure(self, l: int) -> Vec:
        """R(J_l)^{N_l}, an element of the subgroup."""
        h = self.ambient.scale(self.class_orders[l], self.basis_reps[l])
        if h not in self._sub_set:
            raise InvalidInputError("basis closure left the subgroup")
        return h

    def discrepancy(self, m: Vec, k: Vec) -> Vec:
        """h(J,K) with R(J)R(K) = R(JK) h(J,K); factorizes over cyclic factors."""
        out = self.ambient.identity
        for l, (ml, kl, nl) in enumerate(zip(m, k, self.class_orders)):
            if ml + kl >= nl:
                out = self.ambient.add(out, self.closure(l))
        return out


def choose_coset_representatives(
    ambient: FiniteAbelianGroup, subgroup_gens
) -> CosetPresentation:
    return CosetPresentation(ambient, subgroup_gens)


def with_representatives(pres: CosetPresentation, basis_reps) -> CosetPresentation:
    """Same quotient, different (validated) choice of basis representatives."""
    return CosetPresentation(pres.ambient, pres.subgroup, basis_reps=basis_reps)


# ---------------------------------------------------------------------------
# subgroup characters, cocycle phases, lifted characters


class SubgroupCharacters:
    """Characters of a subgroup H of a vector group, labelled by exponent
    vectors over H's own cyclic basis."""

    def __init__(self, ambient: FiniteAbelianGroup, subgroup_elems):
        self.ambient = ambient
        self.elements = tuple(sorted(subgroup_elems))
        self.basis, self.orders = abelian_basis(
            self.elements, ambient.add, ambient.identity
        )
        self.coords = coordinate_map(
            self.basis, self.orders, ambient.add, ambient.identity
        )
        if len(self.coords) != len(self.elements):
            raise InvalidInputError("subgroup element list is not closed")

    @property
    def size(self) -> int:
        return len(self.elements)

    def labels(self):
        return itertools.product(*(range(n) for n in self.orders))

    def exponent(self, label, h) -> Fraction:
        v = self.coords[tuple(h)]
        q = Fraction(0)
        for i, m, n in zip(label, v, self.orders):
            q += Fraction(i * m, n)
        return norm1(q)

    def value(self, label, h) -> complex:
        return unit(self.exponent(label, h))


class CocycleData:
    """Phases phi_i(classes) repairing the mismatch between products of coset
    representatives and representatives of products.

    Per basis factor the phase is the principal N_l-th root of the subgroup
    character at the factor closure; general classes get the product.
    Satisfies  Psi_i(h(J,K)) phi_i(JK) = phi_i(J) phi_i(K)  exactly.
    """

    def __init__(self, pres: CosetPresentation, chars: SubgroupCharacters,
                 base_exponents=None):
        self.pres = pres
        self.chars = chars
        if base_exponents is None:
            base_exponents = {}
            for lab in chars.labels():
                roots = []
                for l, nl in enumerate(pres.class_orders):
                    psi = chars.exponent(lab, pres.closure(l))
                    roots.append(principal_root_exp(psi, nl))
                base_exponents[lab] = tuple(roots)
        self.base_exponents = base_exponents

    def phi_exponent(self, label, m: Vec) -> Fraction:
        roots = self.base_exponents[tuple(label)]
        q = Fraction(0)
        for ml, r in zip(m, roots):
            q += ml * r
        return norm1(q)

    def phi(self, label, m: Vec) -> complex:
        return unit(self.phi_exponent(label, m))

    def check_cocycle_law(self) -> Fraction:
        """Max deviation exponent of the defining law; Fraction(0) if exact."""
        worst = Fraction(0)
        for lab in self.chars.labels():
            for m in self.pres.class_labels():
                for k in self.pres.class_labels():
                    mk = tuple(
                        (a + b) % n
                        for a, b, n in zip(m, k, self.pres.class_orders)
                    )
                    lhs = norm1(
                        self.chars.exponent(lab, self.pres.discrepancy(m, k))
                        + self.phi_exponent(lab, mk)
                    )
                    rhs = norm1(
                        self.phi_exponent(lab, m) + self.phi_exponent(lab, k)
                    )
                    dev = norm1(lhs - rhs)
                    dev = min(dev, 1 - dev)
                    worst = max(worst, dev)
        return worst


def cocycle_phases(pres: CosetPresentation, chars: SubgroupCharacters) -> CocycleData:
    return CocycleData(pres, chars)


def rebase_phases(
    cocycle: CocycleData, new_pres: CosetPresentation
) -> CocycleData:
    """Transport cocycle phases to a new representative choice r(m) = H(m) R(m).

    The new phases are phi'_i(m) = phi_i(m) Psi_i(H(m)); they satisfy the
    cocycle law for the new presentation's discrepancies.
    """
    old = cocycle.pres
    if new_pres.ambient.orders != old.ambient.orders:
        raise InvalidInputError("presentations live in different ambient groups")
    if new_pres.subgroup != old.subgroup:
        raise InvalidInputError("presentations quotient by different subgroups")
    if new_pres.class_orders != old.class_orders:
        raise InvalidInputError("class bases are incompatible")
    chars = cocycle.chars
    base = {}
    for lab in chars.labels():
        roots = []
        for l in range(len(old.class_orders)):
            e_l = tuple(
                1 if i == l else 0 for i in range(len(old.class_orders))
            )
            shift = new_pres.ambient.add(
                new_pres.representative(e_l),
                new_pres.ambient.neg(old.representative(e_l)),
            )
            if not old.in_subgroup(shift):
                raise InvalidInputError(
                    "new representatives are not in the old classes"
                )
            roots.append(
                norm1(
                    cocycle.base_exponents[lab][l] + chars.exponent(lab, shift)
                )
            )
        base[lab] = tuple(roots)
    out = CocycleData(new_pres, chars, base_exponents=base)
    if out.check_cocycle_law() != 0:
        raise InvalidInputError("rebased phases violate the cocycle law")
    return out


class LiftedCharacters:
    """Characters of the ambient group built from coset characters, subgroup
    characters and cocycle phases; restrict to plain subgroup characters on H.
    """

    def __init__(self, cocycle: CocycleData):
        self.pres = cocycle.pres
        self.chars = cocycle.chars
        self.cocycle = cocycle
        self.labels = [
            (m, i)
            for m in self.pres.class_labels()
            for i in self.chars.labels()
        ]

    def exponent(self, label, g: Vec) -> Fraction:
        m_char, i = label
        cls = self.pres.class_of(g)
        h = self.pres.subgroup_part(g)
        q = Fraction(0)
        for mc, c, n in zip(m_char, cls, self.pres.class_orders):
            q += Fraction(mc * c, n)
        q += self.chars.exponent(i, h)
        q += self.cocycle.phi_exponent(i, cls)
        return norm1(q)

    def value(self, label, g: Vec) -> complex:
        return unit(self.exponent(label, g))

    def matrix(self) -> np.ndarray:
        elems = list(self.pres.ambient.elements())
        out = np.empty((len(self.labels), len(elems)), dtype=complex)
        for r, lab in enumerate(self.labels):
            for c, g in enumerate(elems):
                out[r, c] = self.value(lab, g)
        return out


def lifted_characters(cocycle: CocycleData) -> LiftedCharacters:
    return LiftedCharacters(cocycle)


# ---------------------------------------------------------------------------
# congruence systems for untwisted representatives


@dataclass
class TwistSystem:
    """Exact data of the representative-correction congruences.

    orders[j]  : order N_j of generator L_j in the stabilizer quotient
    r[i][j]    : integer with F(L_i, L_j) = exp(2 pi i r_ij / gcd(N_i, N_j))
    p[i]       : Fraction with F(X, L_i) = exp(2 pi i p_i)
    Solves  sum_j k_j r_ji / N_ij = -p_i (mod 1)  for k_j in Z_{N_j}.
    """

    orders: tuple[int, ...]
    r: tuple[tuple[int, ...], ...]
    p: tuple[Fraction, ...]

    def __post_init__(self):
        n = len(self.orders)
        if len(self.r) != n or any(len(row) != n for row in self.r):
            raise InvalidInputError("r must be square of size len(orders)")
        if len(self.p) != n:
            raise InvalidInputError("p must have one entry per generator")
        if any(o < 1 for o in self.orders):
            raise InvalidInputError("orders must be >= 1")

    @property
    def n(self) -> int:
        return len(self.orders)

    def n_ij(self, i: int, j: int) -> int:
        return _gcd(self.orders[i], self.orders[j])

    def lhs_exponent(self, k, i: int) -> Fraction:
        q = Fraction(0)
        for j in range(self.n):
            q += Fraction(k[j] * self.r[j][i], self.n_ij(i, j))
        return norm1(q)

    def is_solution(self, k) -> bool:
        return all(
            norm1(self.lhs_exponent(k, i) + self.p[i]) == 0 for i in range(self.n)
        )


def smith_normal_form(a):
    """Smith normal form over the integers for small dense matrices.

    Returns (d, u, v) with u a v = d, u and v unimodular, d diagonal with
    divisibility along the diagonal. Pure-Python ints, no overflow.
    """
    a = [list(map(int, row)) for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for row in a:
            row[dst] += c * row[src]
        for row in v:
            row[dst] += c * row[src]

    t = 0
    while t < min(m, n):
        # find pivot: smallest nonzero magnitude in the trailing block
        piv = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        # enforce divisibility d_t | trailing entries
        fixed = True
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if a[i][j] % a[t][t]:
                    add_row(i, t, 1)
                    fixed = False
                    break
            if not fixed:
                break
        if fixed:
            t += 1
    return a, u, v


def _solve_mod(a_rows, b, modulus):
    """One solution of A y = b (mod modulus) over Z, via Smith reduction.

    Returns (particular solution list, list of kernel generators mod the
    modulus lattice) or raises InconsistentSystemError.
    """
    m = len(a_rows)
    n = len(a_rows[0]) if m else 0
    d, u, v = smith_normal_form(a_rows)
    # rhs in the transformed basis
    ub = [sum(u[i][k] * b[k] for k in range(m)) % modulus for i in range(m)]
    y = [0] * n
    kernel = []
    for i in range(n):
        di = d[i][i] if i < m else 0
        rhs = ub[i] if i < m else 0
        if di == 0:
            if i < m and rhs % modulus:
                raise InconsistentSystemError("congruence system has no solution")
            kernel.append((i, 1))  # fully free coordinate
            continue
        g = _gcd(di, modulus)
        if rhs % g:
            raise InconsistentSystemError("congruence system has no solution")
        y[i] = (rhs // g) * pow(di // g, -1, modulus // g) % (modulus // g)
        if g > 1:
            kernel.append((i, modulus // g))
    k_part = [sum(v[j][i] * y[i] for i in range(n)) for j in range(n)]
    kernel_vecs = []
    for (i, step) in kernel:
        kernel_vecs.append([v[j][i] * step for j in range(n)])
    return k_part, kernel_vecs


def is_nondegenerate(system: TwistSystem) -> bool:
    """Brute-force the vanishing condition: only m = 0 annihilates all columns."""
    n = system.n
    for m in itertools.product(*(range(o) for o in system.orders)):
        if not any(m):
            continue
        if all(
            norm1(
                sum(
                    (Fraction(m[i] * system.r[i][j], system.n_ij(i, j)))
                    for i in range(n)
                )
            )
            == 0
            for j in range(n)
        ):
            return False
    return True


def solve_congruence_system(
    system: TwistSystem, require_nondegenerate: bool = True
) -> tuple[int, ...]:
    """Canonical solution of the representative-correction congruences.

    With the nondegeneracy condition the solution is unique in prod Z_{N_j};
    without it the lexicographically smallest solution is returned.
    """
    if require_nondegenerate and not is_nondegenerate(system):
        raise DegenerateSystemError("twist pairing is degenerate")
    n = system.n
    if n == 0:
        return ()
    big_l = lcm_all(system.orders)
    for q in system.p:
        big_l = _lcm(big_l, q.denominator)
    # integerized system: rows = equations i, cols = unknowns j
    a = [
        [system.r[j][i] * (big_l // system.n_ij(i, j)) for j in range(n)]
        for i in range(n)
    ]
    b = [int(norm1(-system.p[i]) * big_l) for i in range(n)]
    part, kernel_vecs = _solve_mod(a, b, big_l)
    k = tuple(part[j] % system.orders[j] for j in range(n))
    if not system.is_solution(k):
        raise InconsistentSystemError("solver produced a non-solution")
    if require_nondegenerate:
        return k
    # canonicalize over the full solution set
    sols = congruence_solution_set(system)
    if not sols:
        raise InconsistentSystemError("congruence system has no solution")
    return min(sols)


def congruence_solution_set(system: TwistSystem) -> list[tuple[int, ...]]:
    """All solutions by exhaustive search (small systems only)."""
    out = []
    for k in itertools.product(*(range(o) for o in system.orders)):
        if system.is_solution(k):
            out.append(k)
    return out
