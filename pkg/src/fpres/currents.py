"""Simple currents, monodromy charges, stabilizers and fixed-point bundles.

A simple current is a field whose fusion acts as a permutation; the set of
all of them forms an abelian group under fusion. Each current J carries a
unitary matrix S^J supported on the fields it fixes, together with a
diagonal eta^J. One-dimensional S^J follow in closed form from the twisted
modular relation; product theories compose them factor-wise; anything else
arrives as explicit input.

Twist factors F(a, K, J) compare the K-translated rows of S^J against the
monodromy phase and are snapped to exact roots of unity.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    InvalidInputError,
    MalformedBundleError,
    ResolutionError,
)
from .groups import MultGroup, lcm_all
from .modular import ModularData, fusion_matrix
from .phases import norm1, snap_phase, unit


@dataclass
class FixedPointBundle:
    """Unitary S^J on the fixed fields of a current, with diagonal eta^J."""

    current: int
    fields: tuple          # sorted base-field ids, the support
    matrix: np.ndarray
    eta: np.ndarray = None

    def __post_init__(self):
        n = len(self.fields)
        if self.matrix.shape != (n, n):
            raise MalformedBundleError(
                f"matrix shape {self.matrix.shape} does not match {n} fields"
            )
        if self.eta is not None and self.eta.shape != (n,):
            raise MalformedBundleError("eta length does not match the support")
        self._pos = {a: i for i, a in enumerate(self.fields)}

    @property
    def dim(self) -> int:
        return len(self.fields)

    def position(self, a: int) -> int:
        try:
            return self._pos[a]
        except KeyError:
            raise ResolutionError(
                f"field {a} is not fixed by current {self.current}"
            ) from None


def solve_1x1_bundle(t_exponent: Fraction):
    """Unique unimodular solution of the twisted torus relation in size one:
    s = t^-3, and (s)^2 = eta gives eta = t^-6."""
    s = unit(norm1(-3 * t_exponent))
    eta = unit(norm1(-6 * t_exponent))
    return np.array([[s]]), np.array([eta])


def detect_simple_currents(md: ModularData, tol: float = 1e-6):
    """Field ids whose vacuum S-column has vacuum magnitude."""
    if md.factors is not None:
        parts = [detect_simple_currents(f, tol) for f in md.factors]
        sizes = [f.size for f in md.factors]
        out = [
            int(np.ravel_multi_index(combo, sizes))
            for combo in itertools.product(*parts)
        ]
        return sorted(out)
    col = np.abs(md.s_block(range(md.size), [0]).ravel())
    return [int(j) for j in np.where(np.abs(col - col[0]) < tol)[0]]


def current_permutation(md: ModularData, j: int, tol: float = 1e-6) -> np.ndarray:
    """Fusion action of a simple current as a permutation of field ids."""
    if md.factors is not None:
        sizes = [f.size for f in md.factors]
        ji = np.unravel_index(j, sizes)
        parts = [
            current_permutation(f, int(jf), tol)
            for f, jf in zip(md.factors, ji)
        ]
        grids = np.meshgrid(*parts, indexing="ij")
        return np.ravel_multi_index(
            tuple(g.ravel() for g in grids), sizes
        ).astype(np.intp)
    n = fusion_matrix(md, j, tol=max(tol, 1e-6))
    if not np.array_equal(n.sum(axis=1), np.ones(md.size, dtype=np.int64)):
        raise InvalidInputError(f"field {j} does not fuse as a permutation")
    return np.argmax(n, axis=1).astype(np.intp)


class Theory:
    """Modular data together with its simple-current group and bundles."""

    def __init__(self, md: ModularData, tol: float = 1e-6, extra_bundles=()):
        self.md = md
        self.tol = tol
        ids = detect_simple_currents(md, tol)
        self.perms = {j: current_permutation(md, j, tol) for j in ids}
        self.center = MultGroup(ids, lambda a, b: int(self.perms[a][b]), 0)
        # twist orders divide current orders, so fold those in too
        self.snap_order = lcm_all(
            [md.t_exponent(a).denominator for a in range(md.size)]
            + [norm1(md.h[j]).denominator for j in ids]
            + [self.center.order_of(j) for j in ids]
        )
        self._bundles = {}
        for b in extra_bundles:
            if b.current not in self.perms:
                raise InvalidInputError(
                    f"bundle current {b.current} is not a simple current"
                )
            fixed = tuple(int(a) for a in self.fixed_fields(b.current))
            if tuple(sorted(b.fields)) != fixed:
                raise MalformedBundleError(
                    f"bundle support for current {b.current} does not match "
                    f"its fixed fields"
                )
            self._bundles[b.current] = b
        self._twists = {}

    # --- current basics

    def current_h(self, j: int) -> Fraction:
        return self.md.h[j]

    def current_order(self, j: int) -> int:
        return self.center.order_of(j)

    def inverse(self, j: int) -> int:
        return self.center.inverse(j)

    def apply(self, j: int, a: int) -> int:
        return int(self.perms[j][a])

    def charge_exponent(self, j: int, a: int) -> Fraction:
        """Monodromy of the current around a field, exact mod 1."""
        return norm1(self.md.h[a] + self.md.h[j] - self.md.h[self.apply(j, a)])

    def is_local(self, j: int, a: int) -> bool:
        return self.charge_exponent(j, a) == 0

    def integer_spin_currents(self, members=None):
        members = self.center.elements if members is None else members
        return tuple(j for j in members if norm1(self.md.h[j]) == 0)

    def subgroup(self, gens):
        for g in gens:
            if g not in self.perms:
                raise InvalidInputError(f"{g} is not a simple current")
        return self.center.subgroup(gens)

    # --- stabilizers

    def fixed_fields(self, j: int) -> np.ndarray:
        return np.where(self.perms[j] == np.arange(self.md.size))[0]

    def stabilizer(self, a: int, members=None):
        members = self.center.elements if members is None else members
        return tuple(j for j in members if self.apply(j, a) == a)

    def untwisted_stabilizer(self, a: int, members):
        """Currents in the stabilizer whose twists against all of it vanish."""
        stab = self.stabilizer(a, members)
        return tuple(
            j
            for j in stab
            if all(self.twist_exponent(a, k, j) == 0 for k in stab)
        )

    # --- bundles

    def bundle(self, j: int) -> FixedPointBundle:
        if j in self._bundles:
            return self._bundles[j]
        if j == 0:
            raise InvalidInputError("the identity current has no bundle; use S")
        fixed = [int(a) for a in self.fixed_fields(j)]
        if self.md.factors is not None:
            b = self._product_bundle(j, fixed)
        elif len(fixed) == 0:
            b = FixedPointBundle(j, (), np.zeros((0, 0), dtype=complex),
                                 np.zeros(0, dtype=complex))
        elif len(fixed) == 1:
            mat, eta = solve_1x1_bundle(self.md.t_exponent(fixed[0]))
            b = FixedPointBundle(j, tuple(fixed), mat, eta)
        else:
            raise ResolutionError(
                f"no closed form for the {len(fixed)}-dimensional bundle of "
                f"current {j}; provide it as input"
            )
        self._bundles[j] = b
        return b

    def _product_bundle(self, j: int, fixed) -> FixedPointBundle:
        sizes = [f.size for f in self.md.factors]
        ji = np.unravel_index(j, sizes)
        mats, etas, supports = [], [], []
        for f, jf in zip(self.md.factors, ji):
            jf = int(jf)
            if jf == 0:
                mats.append(f.s)
                etas.append(np.ones(f.size, dtype=complex))
                supports.append(np.arange(f.size))
            else:
                sub = _atomic_theory(f, self.tol)
                fb = sub.bundle(jf)
                mats.append(fb.matrix)
                eta = fb.eta
                if eta is None:
                    raise ResolutionError(
                        f"factor bundle for {jf} lacks eta data"
                    )
                etas.append(eta)
                supports.append(np.asarray(fb.fields, dtype=np.intp))
        mat = np.array([[1.0 + 0.0j]])
        eta = np.array([1.0 + 0.0j])
        for m, e in zip(mats, etas):
            mat = np.kron(mat, m)
            eta = np.kron(eta, e)
        grids = np.meshgrid(*supports, indexing="ij")
        support = np.ravel_multi_index(
            tuple(g.ravel() for g in grids), sizes
        )
        if sorted(int(x) for x in support) != fixed:
            raise ResolutionError("factor supports do not tile the fixed set")
        return FixedPointBundle(j, tuple(int(x) for x in support), mat, eta)

    def bundle_block(self, j: int, rows, cols) -> np.ndarray:
        """S^J entries on arbitrary support fields; j = 0 means S itself."""
        if j == 0:
            return self.md.s_block(rows, cols)
        b = self.bundle(j)
        ri = [b.position(a) for a in rows]
        ci = [b.position(a) for a in cols]
        return b.matrix[np.ix_(ri, ci)]

    def bundle_entry(self, j: int, a: int, b: int) -> complex:
        return self.bundle_block(j, [a], [b])[0, 0]

    def eta_value(self, j: int, a: int) -> complex:
        b = self.bundle(j)
        if b.eta is None:
            raise ResolutionError(f"bundle for current {j} lacks eta data")
        return b.eta[b.position(a)]

    # --- twists

    def twist_exponent(self, a: int, k: int, j: int) -> Fraction:
        """Exact exponent of F(a, K, J); a must be fixed by J."""
        key = (a, k, j)
        if key in self._twists:
            return self._twists[key]
        if j == 0:
            out = Fraction(0)
        else:
            b = self.bundle(j)
            if b.dim == 1:
                # one-dimensional bundles twist by the inverse monodromy
                out = norm1(-self.charge_exponent(k, a))
            else:
                out = self._extract_twist(b, a, k)
        self._twists[key] = out
        return out

    def twist_value(self, a: int, k: int, j: int) -> complex:
        return unit(self.twist_exponent(a, k, j))

    def _extract_twist(self, b: FixedPointBundle, a: int, k: int) -> Fraction:
        ka = self.apply(k, a)
        row_a = b.matrix[b.position(a)]
        row_ka = b.matrix[b.position(ka)]
        phases = np.array(
            [unit(-self.charge_exponent(k, c)) for c in b.fields]
        )
        mask = np.abs(row_a) > 1e-6
        if not mask.any():
            raise ResolutionError(
                f"row of field {a} in bundle {b.current} vanishes"
            )
        ratios = row_ka[mask] * phases[mask] / row_a[mask]
        mean = ratios.mean()
        if np.abs(ratios - mean).max() > 1e-6:
            raise ResolutionError(
                f"twist of ({a},{k}) against {b.current} is not constant"
            )
        return snap_phase(mean, self.snap_order, tol=1e-6)


def _atomic_theory(md: ModularData, tol: float) -> Theory:
    # cached on the factor itself so repeated product bundles stay cheap
    if not hasattr(md, "_theory_cache"):
        md._theory_cache = Theory(md, tol)
    return md._theory_cache


# ---------------------------------------------------------------------------
# bundle serialization, format "fp-bundle v1"


def bundle_to_document(md: ModularData, b: FixedPointBundle) -> dict:
    from .modular import _label_to_json

    doc = {
        "format": "fp-bundle v1",
        "current": _label_to_json(md.labels[b.current]),
        "fields": [_label_to_json(md.labels[a]) for a in b.fields],
        "matrix": [
            [[float(z.real), float(z.imag)] for z in row] for row in b.matrix
        ],
    }
    if b.eta is not None:
        doc["eta"] = [[float(z.real), float(z.imag)] for z in b.eta]
    return doc


def bundle_from_document(md: ModularData, doc: dict) -> FixedPointBundle:
    from .modular import _label_from_json

    if doc.get("format") != "fp-bundle v1":
        raise MalformedBundleError(
            f"unsupported bundle format {doc.get('format')!r}"
        )
    try:
        j = md.index(_label_from_json(doc["current"]))
        fields = tuple(md.index(_label_from_json(x)) for x in doc["fields"])
        mat = np.array(
            [[complex(re, im) for re, im in row] for row in doc["matrix"]]
        )
        eta = None
        if "eta" in doc:
            eta = np.array([complex(re, im) for re, im in doc["eta"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedBundleError(f"malformed bundle document: {exc}") from exc
    return FixedPointBundle(j, fields, mat, eta)


def save_bundle(md: ModularData, b: FixedPointBundle, path) -> None:
    with open(path, "w") as fh:
        json.dump(bundle_to_document(md, b), fh, indent=1)
        fh.write("\n")


def load_bundle(md: ModularData, path) -> FixedPointBundle:
    with open(path) as fh:
        return bundle_from_document(md, json.load(fh))
