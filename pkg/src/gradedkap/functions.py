"""Functions on a graded chart, vector fields, and the homological field Q.

A chart has coordinates x^0..x^{d-1} of integer degrees d_i.  The frame
field d/dx^j (written ``d_j``) has degree -d_j, so coordinates and frame
directions share parities.  Functions are finite sums of canonical
monomials; vector fields keep their coefficients on the left of the frame.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .core import (
    InvalidInput,
    NotAnLInftyStructure,
    canonicalize,
    merge,
    sign,
    to_scalar,
)


class Chart:
    """Coordinates with degrees and an optional weight cap.

    ``weight=None`` is exact mode: all objects here are polynomials, so
    exact arithmetic always terminates.  With an integer weight, products
    drop monomials of larger weight.
    """

    def __init__(self, degrees: Sequence[int], names: Sequence[str] | None = None,
                 weight: int | None = None):
        if len(degrees) < 1:
            raise InvalidInput("a chart needs at least one coordinate")
        if weight is not None and weight < 1:
            raise InvalidInput("truncation weight must be positive")
        self.degrees = tuple(int(d) for d in degrees)
        self.dim = len(self.degrees)
        self.names = tuple(names) if names is not None else tuple(f"x{i + 1}" for i in range(self.dim))
        if len(self.names) != self.dim:
            raise InvalidInput("one name per coordinate")
        self.weight = weight
        self.odd = tuple(bool(d % 2) for d in self.degrees)
        self._deriv: dict = {}

    @property
    def all_odd(self) -> bool:
        return all(self.odd)

    def exact(self) -> "Chart":
        if self.weight is None:
            return self
        return Chart(self.degrees, self.names, None)

    def key(self):
        return (self.degrees, self.names, self.weight)

    def same(self, other: "Chart") -> bool:
        return self is other or (self.degrees == other.degrees and self.names == other.names)

    def mono_degree(self, m: tuple) -> int:
        return sum(self.degrees[i] for i in m)

    def mono_parity(self, m: tuple) -> int:
        return sum(1 for i in m if self.odd[i]) % 2

    def deriv(self, j: int, m: tuple):
        """Left partial derivative d_j of a canonical monomial."""
        key = (j, m)
        hit = self._deriv.get(key)
        if hit is not None:
            return hit
        out = []
        if j in m:
            p = m.index(j)
            r = m.count(j)
            rest = m[:p] + m[p + 1:]
            if self.odd[j]:
                s = sign(sum(1 for i in m[:p] if self.odd[i]))
                out.append((s, rest))
            else:
                out.append((r, rest))
        self._deriv[key] = out
        return out

    def monomials(self, max_weight: int, min_weight: int = 0) -> list[tuple]:
        """All canonical monomials with weight in [min_weight, max_weight]."""
        out = []
        for w in range(min_weight, max_weight + 1):
            for combo in itertools.combinations_with_replacement(range(self.dim), w):
                if all(not (a == b and self.odd[a]) for a, b in zip(combo, combo[1:])):
                    out.append(combo)
        return out

    def __repr__(self):
        return f"Chart(degrees={self.degrees}, weight={self.weight})"


def _check_chart(a: Chart, b: Chart):
    if not a.same(b):
        raise InvalidInput("chart mismatch")


def fmul_terms(chart: Chart, a: Mapping, b: Mapping) -> dict:
    """Product of two function term maps."""
    out: dict = {}
    cap = chart.weight
    odd = chart.odd
    for ma, ca in a.items():
        for mb, cb in b.items():
            if cap is not None and len(ma) + len(mb) > cap:
                continue
            r = merge(ma, mb, odd)
            if r is None:
                continue
            s, m = r
            v = out.get(m, 0) + s * ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def fderiv_terms(chart: Chart, j: int, a: Mapping) -> dict:
    out: dict = {}
    for m, c in a.items():
        for s, rest in chart.deriv(j, m):
            v = out.get(rest, 0) + s * c
            if v:
                out[rest] = v
            else:
                out.pop(rest, None)
    return out


def add_into(out: dict, key, value):
    if not value:
        return
    v = out.get(key, 0) + value
    if v:
        out[key] = v
    else:
        out.pop(key, None)


class _Linear:
    """Finite sum of keyed terms with nonzero rational coefficients."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms: Mapping | None = None):
        self.chart = chart
        clean = {}
        if terms:
            for k, v in terms.items():
                if v:
                    clean[k] = Fraction(v)
        self.terms = clean

    def _new(self, terms):
        return type(self)(self.chart, terms)

    def term_degree(self, key) -> int:  # pragma: no cover - overridden
        raise NotImplementedError

    def __add__(self, other):
        if isinstance(other, int) and other == 0:
            return self
        _check_chart(self.chart, other.chart)
        out = dict(self.terms)
        for k, v in other.terms.items():
            add_into(out, k, v)
        return self._new(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def scaled(self, c) -> "_Linear":
        c = to_scalar(c)
        if not c:
            return self._new({})
        return self._new({k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, _Linear):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {self.term_degree(k) for k in self.terms}

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise InvalidInput(f"inhomogeneous element with degrees {sorted(ds)}")
        return ds.pop() if ds else 0

    def homogeneous_parts(self) -> dict[int, "_Linear"]:
        parts: dict[int, dict] = {}
        for k, v in self.terms.items():
            parts.setdefault(self.term_degree(k), {})[k] = v
        return {d: self._new(t) for d, t in sorted(parts.items())}

    def truncated(self, weight: int) -> "_Linear":
        return self._new({k: v for k, v in self.terms.items() if self._weight(k) <= weight})

    def _weight(self, key) -> int:
        return len(key[0])

    def sorted_terms(self):
        return sorted(self.terms.items())


class FormalFunction(_Linear):
    """Polynomial in the chart coordinates; keys are canonical monomials."""

    __slots__ = ()

    @classmethod
    def constant(cls, chart: Chart, c=1) -> "FormalFunction":
        return cls(chart, {(): to_scalar(c)})

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "FormalFunction":
        return cls(chart, {(i,): Fraction(1)})

    @classmethod
    def monomial(cls, chart: Chart, word: Iterable[int], c=1) -> "FormalFunction":
        r = canonicalize(word, chart.degrees)
        if r is None:
            return cls(chart, {})
        m, s = r
        if chart.weight is not None and len(m) > chart.weight:
            return cls(chart, {})
        return cls(chart, {m: s * to_scalar(c)})

    def term_degree(self, key) -> int:
        return self.chart.mono_degree(key)

    def _weight(self, key) -> int:
        return len(key)

    def __mul__(self, other):
        if isinstance(other, FormalFunction):
            return fn_multiply(self, other)
        if isinstance(other, (int, Fraction, str)):
            return self.scaled(other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, str)):
            return self.scaled(other)
        return NotImplemented

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def partial(self, j: int) -> "FormalFunction":
        return FormalFunction(self.chart, fderiv_terms(self.chart, j, self.terms))

    def __repr__(self):
        return f"FormalFunction({format_terms(self.chart, self.terms)})"


def format_mono(chart: Chart, m: tuple) -> str:
    return "*".join(chart.names[i] for i in m) if m else "1"


def format_terms(chart: Chart, terms: Mapping) -> str:
    if not terms:
        return "0"
    return " + ".join(f"({c})*{format_mono(chart, m)}" for m, c in sorted(terms.items()))


def fn_multiply(f: FormalFunction, g: FormalFunction) -> FormalFunction:
    _check_chart(f.chart, g.chart)
    return FormalFunction(f.chart, fmul_terms(f.chart, f.terms, g.terms))


class VectorField(_Linear):
    """Sum of terms f * d_j stored as {(monomial, (j,)): coefficient}."""

    __slots__ = ()

    @classmethod
    def frame(cls, chart: Chart, j: int) -> "VectorField":
        return cls(chart, {((), (j,)): Fraction(1)})

    @classmethod
    def from_components(cls, chart: Chart, comps: Mapping[int, FormalFunction]) -> "VectorField":
        terms = {}
        for j, f in comps.items():
            for m, c in f.terms.items():
                terms[(m, (j,))] = c
        return cls(chart, terms)

    def term_degree(self, key) -> int:
        m, (j,) = key
        return self.chart.mono_degree(m) - self.chart.degrees[j]

    def _weight(self, key) -> int:
        return len(key[0])

    def component(self, j: int) -> FormalFunction:
        return FormalFunction(self.chart, {m: c for (m, (k,)), c in self.terms.items() if k == j})

    def components(self) -> dict[int, FormalFunction]:
        out: dict[int, dict] = {}
        for (m, (j,)), c in self.terms.items():
            out.setdefault(j, {})[m] = c
        return {j: FormalFunction(self.chart, t) for j, t in sorted(out.items())}

    def times_function(self, f: FormalFunction) -> "VectorField":
        """Left multiplication f * X."""
        out: dict = {}
        for (m, jj), c in self.terms.items():
            for mm, cc in fmul_terms(self.chart, f.terms, {m: c}).items():
                add_into(out, (mm, jj), cc)
        return VectorField(self.chart, out)

    def __call__(self, f: FormalFunction) -> FormalFunction:
        return vf_apply(self, f)

    def __repr__(self):
        if not self.terms:
            return "VectorField(0)"
        parts = [f"({c})*{format_mono(self.chart, m)}*d{self.chart.names[j]}"
                 for (m, (j,)), c in sorted(self.terms.items())]
        return "VectorField(" + " + ".join(parts) + ")"


def apply_vf_terms(chart: Chart, xterms: Mapping, fterms: Mapping) -> dict:
    out: dict = {}
    by_j: dict[int, dict] = {}
    for (m, (j,)), c in xterms.items():
        by_j.setdefault(j, {})[m] = c
    for j, coeff in by_j.items():
        df = fderiv_terms(chart, j, fterms)
        if df:
            for m, c in fmul_terms(chart, coeff, df).items():
                add_into(out, m, c)
    return out


def vf_apply(X: VectorField, f: FormalFunction) -> FormalFunction:
    """Left graded derivation X acting on f."""
    _check_chart(X.chart, f.chart)
    return FormalFunction(f.chart, apply_vf_terms(f.chart, X.terms, f.terms))


def vf_commutator(X: VectorField, Y: VectorField) -> VectorField:
    """Graded commutator [X,Y] = XY - (-1)^{|X||Y|} YX, bilinear in parts."""
    _check_chart(X.chart, Y.chart)
    chart = X.chart
    out: dict = {}
    xparts = X.homogeneous_parts()
    yparts = Y.homogeneous_parts()
    for dx, Xp in xparts.items():
        for dy, Yp in yparts.items():
            s = sign(dx * dy)
            ycomp = Yp.components()
            xcomp = Xp.components()
            for j, g in ycomp.items():
                for m, c in apply_vf_terms(chart, Xp.terms, g.terms).items():
                    add_into(out, (m, (j,)), c)
            for j, f in xcomp.items():
                for m, c in apply_vf_terms(chart, Yp.terms, f.terms).items():
                    add_into(out, (m, (j,)), -s * c)
    return VectorField(chart, out)


class LInftySpec:
    """Finite-dimensional L-infinity[1] algebra by structure constants.

    ``degrees[i]`` is deg e_i in g[1]; ``brackets[k][I][j]`` is c^j_I for
    an ascending index tuple I of length k.
    """

    def __init__(self, names: Sequence[str], degrees: Sequence[int],
                 brackets: Mapping[int, Mapping[tuple, Mapping[int, Fraction]]], name: str = ""):
        self.name = name
        self.names = tuple(names)
        self.degrees = tuple(int(d) for d in degrees)
        if len(self.names) != len(self.degrees) or not self.names:
            raise InvalidInput("one degree per generator, at least one generator")
        if len(set(self.names)) != len(self.names):
            raise InvalidInput("duplicate generator names")
        self.dim = len(self.names)
        self.odd = tuple(bool(d % 2) for d in self.degrees)
        self.brackets: dict[int, dict[tuple, dict[int, Fraction]]] = {}
        for k, table in brackets.items():
            if k < 1:
                raise InvalidInput("curved structures (q_0) are not supported")
            for I, out in table.items():
                I = tuple(I)
                if len(I) != k or list(I) != sorted(I):
                    raise InvalidInput(f"bracket inputs {I} must be an ascending tuple of length {k}")
                if any(a == b and self.odd[a] for a, b in zip(I, I[1:])):
                    raise InvalidInput(f"bracket inputs {I} repeat an odd generator")
                for j, c in out.items():
                    c = to_scalar(c)
                    if not c:
                        continue
                    if self.degrees[j] != 1 + sum(self.degrees[i] for i in I):
                        raise InvalidInput(f"bracket {I} -> {self.names[j]} violates degree +1")
                    self.brackets.setdefault(k, {}).setdefault(I, {})[j] = c
        self.brackets = {k: v for k, v in sorted(self.brackets.items()) if v}

    @property
    def max_arity(self) -> int:
        return max(self.brackets, default=0)

    def coefficient(self, word: Sequence[int]) -> dict[int, Fraction]:
        """q_k(e_{w1},...,e_{wk}) as {j: c}, for an arbitrary word."""
        r = canonicalize(word, self.degrees)
        if r is None:
            return {}
        I, s = r
        table = self.brackets.get(len(I), {}).get(I)
        if not table:
            return {}
        return {j: s * c for j, c in table.items()}

    def chart(self, weight: int | None = None) -> Chart:
        return Chart([-d for d in self.degrees], self.names, weight)

    def __repr__(self):
        return f"LInftySpec({self.name!r}, dim={self.dim})"


class HomologicalVF(VectorField):
    """A degree +1 vector field with [Q,Q] = 0 (checked at construction)."""

    __slots__ = ()


def q_from_spec(spec: LInftySpec, chart: Chart | None = None) -> HomologicalVF:
    """Homological vector field of an L-infinity[1] algebra.

    Q(x^j) = -(-1)^{d_j} sum_k 1/k! c^j_{i1..ik} x^{ik}...x^{i1}; the factor
    (-1)^{d_j} converts the pairing-twisted partials into plain left ones.
    """
    chart = chart or spec.chart()
    if tuple(-d for d in spec.degrees) != chart.degrees:
        raise InvalidInput("chart degrees must be minus the generator degrees")
    terms: dict = {}
    for k, table in spec.brackets.items():
        for I, out in table.items():
            for word in set(itertools.permutations(I)):
                coeff = spec.coefficient(word)
                r = canonicalize(tuple(reversed(word)), chart.degrees)
                if r is None:
                    continue
                m, s = r
                if chart.weight is not None and len(m) > chart.weight:
                    continue
                for j, c in coeff.items():
                    v = -sign(chart.degrees[j]) * s * c / math.factorial(k)
                    add_into(terms, (m, (j,)), v)
    Q = HomologicalVF(chart, terms)
    ok, witness = check_homological(Q)
    if not ok:
        j, f = witness
        raise NotAnLInftyStructure(
            f"[Q,Q] != 0: component d{chart.names[j]} has coefficient {format_terms(chart, f.terms)}",
            witness)
    return Q


def check_homological(Q: VectorField):
    """Return (True, None) or (False, (j, [Q,Q]^j)) for the first nonzero component."""
    if Q.terms and Q.degrees() != {1}:
        raise InvalidInput("Q must be homogeneous of degree +1")
    QQ = vf_commutator(Q, Q)
    for j, f in QQ.components().items():
        if f:
            return False, (j, f)
    return True, None
