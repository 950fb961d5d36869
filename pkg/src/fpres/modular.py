"""Modular data containers: S and T matrices, fusion, tensor products.

A theory is a list of field labels with exact rational conformal weights,
an exact rational central charge and a unitary symmetric S matrix. Large
tensor products keep S in factorized form and materialize blocks on demand.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    FusionIntegralityError,
    InvalidInputError,
    ResourceLimitError,
)
from .phases import norm1, unit

DENSE_LIMIT = 2_000_000  # max entries a dense S materialization may take


class ProductS:
    """Kronecker product of factor S matrices, evaluated lazily.

    Field ids are row-major multi-indices over the factor sizes, matching
    itertools.product over the factor label lists.
    """

    def __init__(self, mats):
        self.mats = [np.asarray(m) for m in mats]
        self.sizes = tuple(m.shape[0] for m in self.mats)
        n = 1
        for s in self.sizes:
            n *= s
        self.size = n

    def unravel(self, ids):
        return np.unravel_index(np.asarray(ids, dtype=np.intp), self.sizes)

    def entry(self, a: int, b: int) -> complex:
        ai = np.unravel_index(a, self.sizes)
        bi = np.unravel_index(b, self.sizes)
        out = 1.0 + 0.0j
        for m, i, j in zip(self.mats, ai, bi):
            out *= m[i, j]
        return out

    def block(self, rows, cols) -> np.ndarray:
        ri = self.unravel(rows)
        ci = self.unravel(cols)
        out = np.ones((len(ri[0]), len(ci[0])), dtype=complex)
        for m, r, c in zip(self.mats, ri, ci):
            out *= m[np.ix_(r, c)]
        return out

    def row(self, a: int) -> np.ndarray:
        ai = np.unravel_index(a, self.sizes)
        out = np.array([1.0 + 0.0j])
        for m, i in zip(self.mats, ai):
            out = np.kron(out, m[i])
        return out

    def to_dense(self) -> np.ndarray:
        if self.size * self.size > DENSE_LIMIT:
            raise ResourceLimitError(
                f"dense S would need {self.size}^2 entries"
            )
        out = np.array([[1.0 + 0.0j]])
        for m in self.mats:
            out = np.kron(out, m)
        return out


@dataclass
class ModularData:
    """Field labels, exact weights, central charge and the S matrix."""

    labels: tuple
    h: tuple
    c: Fraction
    s: object            # np.ndarray or ProductS
    name: str = ""
    factors: tuple = None  # factor ModularData for tensor products

    def __post_init__(self):
        if len(self.labels) != len(self.h):
            raise InvalidInputError("labels and weights differ in length")
        if self.size != (self.s.shape[0] if isinstance(self.s, np.ndarray) else self.s.size):
            raise InvalidInputError("S matrix size does not match field count")
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise InvalidInputError("field labels are not distinct")
        self._conj = None

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def is_product(self) -> bool:
        return isinstance(self.s, ProductS)

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InvalidInputError(f"unknown field label {label!r}") from None

    def t_exponent(self, a: int) -> Fraction:
        return norm1(self.h[a] - self.c / 24)

    def t_exponents(self):
        return [self.t_exponent(a) for a in range(self.size)]

    def t_values(self) -> np.ndarray:
        return np.array([unit(q) for q in self.t_exponents()])

    # --- S access, uniform over dense and factorized storage

    def s_entry(self, a: int, b: int) -> complex:
        if self.is_product:
            return self.s.entry(a, b)
        return self.s[a, b]

    def s_row(self, a: int) -> np.ndarray:
        if self.is_product:
            return self.s.row(a)
        return self.s[a]

    def s_block(self, rows, cols) -> np.ndarray:
        if self.is_product:
            return self.s.block(rows, cols)
        return self.s[np.ix_(list(rows), list(cols))]

    def s_dense(self) -> np.ndarray:
        if self.is_product:
            return self.s.to_dense()
        return self.s

    def conjugation(self) -> np.ndarray:
        """Permutation a -> abar, read off from S^2."""
        if self._conj is not None:
            return self._conj
        if self.is_product:
            parts = [f.conjugation() for f in self.factors]
            grids = np.meshgrid(*parts, indexing="ij")
            flat = np.ravel_multi_index(tuple(g.ravel() for g in grids), self.s.sizes)
            self._conj = flat.astype(np.intp)
        else:
            self._conj = conjugation_from_S(self.s)
        return self._conj

    def atomic_factors(self):
        return self.factors if self.factors is not None else (self,)


def conjugation_from_S(s: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    c = s @ s
    n = c.shape[0]
    perm = np.argmax(np.abs(c), axis=1)
    p = np.zeros_like(c)
    p[np.arange(n), perm] = 1.0
    dev = np.abs(c - p).max()
    if dev > tol:
        raise InvalidInputError(
            f"S^2 is not a permutation matrix (deviation {dev:.2e})"
        )
    if not np.array_equal(np.sort(perm), np.arange(n)):
        raise InvalidInputError("S^2 rows do not form a permutation")
    if np.any(perm[perm] != np.arange(n)):
        raise InvalidInputError("conjugation is not an involution")
    return perm.astype(np.intp)


def check_modular(md: ModularData, tol: float = 1e-9) -> dict:
    """Deviations of the defining constraints; factor-wise for products."""
    if md.is_product:
        reports = [check_modular(f, tol) for f in md.factors]
        worst = max(r["max_deviation"] for r in reports)
        return {
            "ok": all(r["ok"] for r in reports),
            "max_deviation": worst,
            "factors": reports,
        }

    s = md.s
    n = md.size
    t = md.t_values()
    checks = {}
    checks["unitary"] = float(np.abs(s @ s.conj().T - np.eye(n)).max())
    checks["symmetric"] = float(np.abs(s - s.T).max())
    c2 = s @ s
    st = s * t[np.newaxis, :]
    checks["st_cubed"] = float(np.abs(st @ st @ st - c2).max())
    try:
        conjugation_from_S(s, tol=max(tol, 1e-6))
        checks["charge_conjugation"] = 0.0
    except InvalidInputError:
        checks["charge_conjugation"] = float("inf")
    row = s[0]
    checks["vacuum_row_imag"] = float(np.abs(row.imag).max())
    checks["vacuum_row_positive"] = float(max(0.0, -row.real.min()))
    worst = max(checks.values())
    return {"ok": worst <= tol, "max_deviation": worst, "checks": checks}


# ---------------------------------------------------------------------------
# fusion


def fusion_matrix(md: ModularData, a: int, tol: float = 1e-6) -> np.ndarray:
    """Integer matrix (N_a)_b^c from the S-matrix sum over the spectrum."""
    s = md.s_dense()
    lam = s[a] / s[0]
    mat = (s * lam[np.newaxis, :]) @ s.conj().T
    out = np.rint(mat.real)
    residual = float(np.abs(mat - out).max())
    if residual > tol:
        raise FusionIntegralityError(
            f"fusion coefficients not integral (residual {residual:.2e})"
        )
    if out.min() < 0:
        raise FusionIntegralityError("negative fusion coefficient")
    return out.astype(np.int64)


def fusion_tensor(md: ModularData, limit: int = 300, tol: float = 1e-6) -> np.ndarray:
    if md.size > limit:
        raise ResourceLimitError(
            f"{md.size} fields exceeds the dense fusion limit {limit}"
        )
    return np.stack([fusion_matrix(md, a, tol) for a in range(md.size)])


def sampled_fusion_residual(
    md: ModularData, n_samples: int, rng, tol: float = 1e-6
) -> float:
    """Max integrality residual over randomly sampled fusion rows.

    Works off full S rows, so it stays cheap for factorized products.
    """
    n = md.size
    worst = 0.0
    row0 = md.s_row(0)
    for _ in range(n_samples):
        a = rng.randrange(n)
        b = rng.randrange(n)
        # N_{ab}^c for all c: sum_m S_am S_bm conj(S_cm) / S_0m
        vec = md.s_row(a) * md.s_row(b) / row0
        if md.is_product:
            col = _product_matvec_conj(md.s, vec)
        else:
            col = md.s.conj() @ vec
        resid = float(np.abs(col - np.rint(col.real)).max())
        worst = max(worst, resid)
        if resid > tol:
            raise FusionIntegralityError(
                f"sampled fusion row ({a},{b}) residual {resid:.2e}"
            )
    return worst


def _product_matvec_conj(ps: ProductS, vec: np.ndarray) -> np.ndarray:
    """conj(S) @ vec for factorized S without materializing S."""
    out = vec.reshape(ps.sizes)
    for axis, m in enumerate(ps.mats):
        out = np.moveaxis(
            np.tensordot(m.conj(), out, axes=([1], [axis])), 0, axis
        )
    return out.ravel()


# ---------------------------------------------------------------------------
# tensor products


def tensor(*mds: ModularData, dense_limit: int = DENSE_LIMIT, name: str = "") -> ModularData:
    if len(mds) < 1:
        raise InvalidInputError("tensor needs at least one factor")
    factors = []
    for md in mds:
        factors.extend(md.atomic_factors())
    if any(isinstance(f.s, ProductS) for f in factors):
        raise InvalidInputError("atomic factors must carry dense S matrices")
    mats = [f.s for f in factors]
    labels = tuple(
        tuple(x) for x in itertools.product(*(f.labels for f in factors))
    )
    h = tuple(
        sum(hs, Fraction(0))
        for hs in itertools.product(*(f.h for f in factors))
    )
    c = sum((f.c for f in factors), Fraction(0))
    n = len(labels)
    if not name:
        name = " x ".join(f.name or "?" for f in factors)
    if n * n <= dense_limit:
        s = mats[0]
        for m in mats[1:]:
            s = np.kron(s, m)
        return ModularData(labels, h, c, s, name=name, factors=tuple(factors))
    return ModularData(labels, h, c, ProductS(mats), name=name, factors=tuple(factors))


# ---------------------------------------------------------------------------
# serialization, format "modular-data v1"


def _label_to_json(lab):
    if isinstance(lab, tuple):
        return [_label_to_json(x) for x in lab]
    return lab


def _label_from_json(lab):
    if isinstance(lab, list):
        return tuple(_label_from_json(x) for x in lab)
    return lab


def to_document(md: ModularData) -> dict:
    # keep the factor structure, it drives bundle construction downstream
    if md.factors is not None:
        return {
            "format": "modular-data v1",
            "name": md.name,
            "product": [to_document(f) for f in md.factors],
        }
    return {
        "format": "modular-data v1",
        "name": md.name,
        "central_charge": str(md.c),
        "fields": [
            {"label": _label_to_json(lab), "h": str(q)}
            for lab, q in zip(md.labels, md.h)
        ],
        "s_matrix": [
            [[float(z.real), float(z.imag)] for z in row] for row in md.s
        ],
    }


def from_document(doc: dict) -> ModularData:
    if doc.get("format") != "modular-data v1":
        raise InvalidInputError(
            f"unsupported document format {doc.get('format')!r}"
        )
    if "product" in doc:
        parts = [from_document(d) for d in doc["product"]]
        return tensor(*parts, name=doc.get("name", ""))
    try:
        labels = tuple(_label_from_json(f["label"]) for f in doc["fields"])
        h = tuple(Fraction(f["h"]) for f in doc["fields"])
        c = Fraction(doc["central_charge"])
        s = np.array(
            [[complex(re, im) for re, im in row] for row in doc["s_matrix"]]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInputError(f"malformed modular data document: {exc}") from exc
    return ModularData(labels, h, c, s, name=doc.get("name", ""))


def save(md: ModularData, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_document(md), fh, indent=1)
        fh.write("\n")


def load(path) -> ModularData:
    with open(path) as fh:
        return from_document(json.load(fh))
