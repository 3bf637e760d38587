"""Graded-commutative polynomial algebras with coefficients in ScalarFn.

Generators carry an integer degree; odd ones anticommute and square to
zero.  A monomial ("word") is stored as a non-decreasing tuple of
generator positions, so the canonical order is the order in which the
generators were declared and every Koszul sign is absorbed at
multiplication time.  The degree-0 chart coordinates live inside the
coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .scalarfield import Chart, ScalarFn

Word = tuple[int, ...]


@dataclass(frozen=True)
class Generator:
    name: str
    index: tuple[int, ...]
    degree: int
    upper: bool = True

    @property
    def odd(self) -> bool:
        return self.degree % 2 == 1

    @property
    def label(self) -> str:
        if not self.index:
            return self.name
        sep = "^" if self.upper else "_"
        return f"{self.name}{sep}{''.join(map(str, self.index))}"


class GradedAlgebra:
    """Free graded-commutative algebra over the rational functions of a chart."""

    def __init__(self, base: Chart, gens: Iterable[Generator]):
        self.base = base
        self.gens: tuple[Generator, ...] = tuple(gens)
        self.pos = {(g.name, g.index): k for k, g in enumerate(self.gens)}
        if len(self.pos) != len(self.gens):
            raise ValueError("duplicate generator")
        self.odd = tuple(g.odd for g in self.gens)
        self.deg = tuple(g.degree for g in self.gens)

    def gen(self, name: str, index: Iterable[int] = ()) -> "GradedPoly":
        key = (name, tuple(index))
        if key not in self.pos:
            raise KeyError(f"no generator {name}{tuple(index)}")
        return GradedPoly(self, {(self.pos[key],): self.base.one()})

    def index_of(self, name: str, index: Iterable[int] = ()) -> int:
        return self.pos[(name, tuple(index))]

    def has(self, name: str, index: Iterable[int] = ()) -> bool:
        return (name, tuple(index)) in self.pos

    def scalar(self, f) -> "GradedPoly":
        if not isinstance(f, ScalarFn):
            f = self.base.const(f)
        return GradedPoly(self, {(): f})

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.scalar(1)

    def word_degree(self, w: Word) -> int:
        return sum(self.deg[k] for k in w)

    def word_parity(self, w: Word) -> int:
        return sum(1 for k in w if self.odd[k]) % 2

    def word_label(self, w: Word) -> str:
        out = []
        k = 0
        while k < len(w):
            g = w[k]
            m = 1
            while k + m < len(w) and w[k + m] == g:
                m += 1
            lab = self.gens[g].label
            out.append(lab if m == 1 else f"({lab})^{m}")
            k += m
        return " ".join(out)

    def with_base(self, base: Chart) -> "GradedAlgebra":
        return GradedAlgebra(base, self.gens)


def mul_words(alg: GradedAlgebra, u: Word, v: Word) -> tuple[int, Word]:
    """Koszul sign and canonical word of the product ``u * v`` (sign 0 if it vanishes)."""
    odd = alg.odd
    if not u:
        return 1, v
    if not v:
        return 1, u
    sign = 1
    ou = [g for g in u if odd[g]]
    for g in v:
        if not odd[g]:
            continue
        n_gt = 0
        for h in ou:
            if h == g:
                return 0, ()
            if h > g:
                n_gt += 1
        if n_gt % 2:
            sign = -sign
    return sign, tuple(sorted(u + v))


class GradedPoly:
    """Finite sum ``sum coeff(x) * word`` in a :class:`GradedAlgebra`."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: GradedAlgebra, terms: Mapping[Word, ScalarFn] | None = None):
        self.alg = alg
        self.terms = {w: c for w, c in (terms or {}).items() if not c.is_zero()}

    # ----- arithmetic ---------------------------------------------------
    def _check(self, other: "GradedPoly"):
        if other.alg is not self.alg:
            raise ValueError("graded polynomials from different algebras")

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        self._check(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out[w] + c if w in out else c
        return GradedPoly(self.alg, out)

    def __neg__(self) -> "GradedPoly":
        return GradedPoly(self.alg, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        return self + (-other)

    def scale(self, f) -> "GradedPoly":
        if isinstance(f, (int, Fraction)):
            if f == 0:
                return self.alg.zero()
            f = self.alg.base.const(f)
        return GradedPoly(self.alg, {w: c * f for w, c in self.terms.items()})

    def __mul__(self, other) -> "GradedPoly":
        if not isinstance(other, GradedPoly):
            return self.scale(other)
        self._check(other)
        out: dict[Word, ScalarFn] = {}
        for u, a in self.terms.items():
            for v, b in other.terms.items():
                s, w = mul_words(self.alg, u, v)
                if s == 0:
                    continue
                t = a * b if s > 0 else -(a * b)
                out[w] = out[w] + t if w in out else t
        return GradedPoly(self.alg, out)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    # ----- structure ----------------------------------------------------
    def degrees(self) -> set[int]:
        return {self.alg.word_degree(w) for w in self.terms}

    def degree(self) -> int:
        """The degree of a homogeneous element (0 for zero)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError(f"inhomogeneous element with degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def select(self, pred: Callable[[Word], bool]) -> "GradedPoly":
        return GradedPoly(self.alg, {w: c for w, c in self.terms.items() if pred(w)})

    def map_coeffs(self, fn: Callable[[ScalarFn], ScalarFn]) -> "GradedPoly":
        return GradedPoly(self.alg, {w: fn(c) for w, c in self.terms.items()})

    def coeff(self, w: Word) -> ScalarFn:
        return self.terms.get(w, self.alg.base.zero())

    # ----- derivatives ----------------------------------------------------
    def dcoord(self, i: int) -> "GradedPoly":
        """Partial derivative along the degree-0 coordinate ``x_i``."""
        return self.map_coeffs(lambda c: c.partial(i))

    def dleft(self, g: int) -> "GradedPoly":
        """Left derivative by generator position ``g``."""
        return self._deriv(g, left=True)

    def dright(self, g: int) -> "GradedPoly":
        return self._deriv(g, left=False)

    def _deriv(self, g: int, left: bool) -> "GradedPoly":
        alg = self.alg
        odd = alg.odd
        out: dict[Word, ScalarFn] = {}
        for w, c in self.terms.items():
            if g not in w:
                continue
            k = w.index(g)
            if odd[g]:
                others = w[:k] if left else w[k + 1:]
                flips = sum(1 for h in others if odd[h])
                val = -c if flips % 2 else c
            else:
                val = c * w.count(g)
            nw = w[:k] + w[k + 1:]
            out[nw] = out[nw] + val if nw in out else val
        return GradedPoly(alg, out)

    # ----- substitution ---------------------------------------------------
    def substitute(self, images: Mapping[int, "GradedPoly"], target: GradedAlgebra | None = None,
                   coeff_map: Callable[[ScalarFn], ScalarFn] | None = None) -> "GradedPoly":
        """Replace generators by the given elements (others map to the same-named
        generator of ``target``), multiplying out in word order.

        ``coeff_map`` moves coefficients if the base chart changes.
        """
        if target is None:
            target = self.alg
        move = coeff_map or (lambda c: c)
        total = GradedPoly(target, {})
        cache: dict[int, GradedPoly] = {}

        def image(g: int) -> GradedPoly:
            if g not in cache:
                if g in images:
                    cache[g] = images[g]
                else:
                    gen = self.alg.gens[g]
                    cache[g] = target.gen(gen.name, gen.index)
            return cache[g]

        for w, c in self.terms.items():
            acc = GradedPoly(target, {(): move(c)})
            for g in w:
                acc = acc * image(g)
                if acc.is_zero():
                    break
            total = total + acc
        return total

    def apply_derivation(self, images: Mapping[int, "GradedPoly"], coord_images: Mapping[int, "GradedPoly"],
                         degree: int) -> "GradedPoly":
        """Apply the derivation ``D`` of the given degree fixed by its generator values.

        Uses ``D = sum_z D(z) d^L/dz``, which is valid for derivations of any
        parity; ``coord_images`` maps coordinate index ``i`` to ``D(x_i)``.
        """
        del degree  # the left-derivative form needs no explicit sign
        total = GradedPoly(self.alg, {})
        for g, img in images.items():
            if img.is_zero():
                continue
            d = self.dleft(g)
            if not d.is_zero():
                total = total + img * d
        for i, img in coord_images.items():
            if img.is_zero():
                continue
            d = self.dcoord(i)
            if not d.is_zero():
                total = total + img * d
        return total

    # ----- output -------------------------------------------------------------
    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]), kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            lab = self.alg.word_label(w)
            cs = str(c)
            if not lab:
                parts.append(cs)
            elif c.is_one():
                parts.append(lab)
            elif (-c).is_one():
                parts.append(f"-{lab}")
            else:
                parts.append(f"({cs}) {lab}")
        return " + ".join(parts).replace("+ -", "- ")

    __repr__ = __str__

