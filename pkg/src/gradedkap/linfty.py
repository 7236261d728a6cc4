"""L-infinity[1] algebras: spec documents, Chevalley-Eilenberg complexes, closed forms.

Elements of S(g[1]) are canonical e-monomials (ascending index tuples).
A cochain F in Hom(S(g[1]), M) is stored by its values on those
monomials: {(J, b): c} means F(e_J) has coefficient c on the module basis
vector b.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from typing import Any, Mapping

from . import linalg
from .coalgebra import shuffle_split
from .connections import Connection, OneTwoTensor, atiyah_cocycle, cQ_apply
from .core import InvalidInput, SpecParseError, merge, sign, to_scalar
from .functions import Chart, FormalFunction, LInftySpec, VectorField, add_into, q_from_spec


# ---------------------------------------------------------------- documents

def parse_spec(document) -> tuple[LInftySpec, dict]:
    """Validate a spec document; returns the spec and the raw options
    (connection, truncation)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise SpecParseError(f"invalid JSON: {e.msg}", f"line {e.lineno} column {e.colno}") from None
    if not isinstance(document, dict):
        raise SpecParseError("top level must be an object", "$")
    gens = document.get("generators")
    if not isinstance(gens, list) or not gens:
        raise SpecParseError("generators must be a non-empty array", "$.generators")
    names, degrees = [], []
    for n, g in enumerate(gens):
        loc = f"$.generators[{n}]"
        if not isinstance(g, dict) or not isinstance(g.get("name"), str):
            raise SpecParseError("generator needs a string name", loc)
        deg = g.get("degree")
        if not isinstance(deg, int) or isinstance(deg, bool):
            raise SpecParseError("generator degree must be an integer", loc + ".degree")
        if g["name"] in names:
            raise SpecParseError(f"duplicate generator {g['name']!r}", loc + ".name")
        names.append(g["name"])
        degrees.append(deg)
    index = {n: i for i, n in enumerate(names)}
    odd = [d % 2 == 1 for d in degrees]
    table: dict[int, dict[tuple, dict[int, Fraction]]] = {}
    for n, b in enumerate(document.get("brackets", []) or []):
        loc = f"$.brackets[{n}]"
        if not isinstance(b, dict):
            raise SpecParseError("bracket entry must be an object", loc)
        inputs = b.get("inputs")
        if not isinstance(inputs, list) or not inputs:
            raise SpecParseError("inputs must be a non-empty array of names", loc + ".inputs")
        try:
            I = tuple(index[x] for x in inputs)
        except (KeyError, TypeError):
            raise SpecParseError(f"unknown generator in inputs {inputs}", loc + ".inputs") from None
        if list(I) != sorted(I):
            raise SpecParseError(f"inputs {inputs} must be listed in generator order", loc + ".inputs")
        if any(a == c and odd[a] for a, c in zip(I, I[1:])):
            raise SpecParseError(f"inputs {inputs} repeat an odd generator", loc + ".inputs")
        k = len(I)
        if I in table.get(k, {}):
            raise SpecParseError(f"duplicate bracket entry for {inputs}", loc)
        out = b.get("output")
        if not isinstance(out, dict):
            raise SpecParseError("output must be an object of name: value", loc + ".output")
        vals = {}
        for name, v in out.items():
            if name not in index:
                raise SpecParseError(f"unknown output generator {name!r}", f"{loc}.output.{name}")
            try:
                c = to_scalar(v)
            except InvalidInput as e:
                raise SpecParseError(str(e), f"{loc}.output.{name}") from None
            j = index[name]
            if c and degrees[j] != 1 + sum(degrees[i] for i in I):
                raise SpecParseError(
                    f"bracket {inputs} -> {name} violates degree +1", f"{loc}.output.{name}")
            if c:
                vals[j] = c
        table.setdefault(k, {})[I] = vals
    try:
        spec = LInftySpec(names, degrees, table, name=str(document.get("name", "")))
    except InvalidInput as e:
        raise SpecParseError(str(e), "$") from None
    options = {"connection": document.get("connection"), "truncation": document.get("truncation") or {}}
    trunc = options["truncation"]
    if not isinstance(trunc, dict):
        raise SpecParseError("truncation must be an object", "$.truncation")
    for key in ("weight", "arity"):
        if key in trunc and (not isinstance(trunc[key], int) or trunc[key] < 1):
            raise SpecParseError(f"truncation {key} must be a positive integer", f"$.truncation.{key}")
    return spec, options


def parse_connection(spec: LInftySpec, chart: Chart, raw) -> Connection:
    if raw is None or raw == {"type": "trivial"}:
        return Connection.trivial(chart)
    if not isinstance(raw, dict) or raw.get("type") not in ("trivial", "christoffel"):
        raise SpecParseError("connection type must be 'trivial' or 'christoffel'", "$.connection.type")
    if raw["type"] == "trivial":
        return Connection.trivial(chart)
    index = {n: i for i, n in enumerate(spec.names)}
    gamma: dict = {}
    for n, e in enumerate(raw.get("entries", []) or []):
        loc = f"$.connection.entries[{n}]"
        try:
            k = index[e["upper"]]
            i, j = (index[x] for x in e["lower"])
        except (KeyError, TypeError, ValueError):
            raise SpecParseError("entry needs upper name and two lower names", loc) from None
        f = FormalFunction(chart, {})
        for m, coeff in enumerate(e.get("coeff", []) or []):
            cl = f"{loc}.coeff[{m}]"
            try:
                word = [index[x] for x in coeff.get("monomial", [])]
                v = to_scalar(coeff["value"])
            except (KeyError, TypeError, AttributeError):
                raise SpecParseError("coefficient needs monomial names and a value", cl) from None
            except InvalidInput as err:
                raise SpecParseError(str(err), cl + ".value") from None
            f = f + FormalFunction.monomial(chart, word, v)
        key = (k, i, j)
        if key in gamma:
            raise SpecParseError("duplicate Christoffel entry", loc)
        gamma[key] = f
    try:
        return Connection(chart, gamma, "christoffel")
    except InvalidInput as err:
        raise SpecParseError(str(err), "$.connection") from None


def spec_document(spec: LInftySpec) -> dict:
    """Serialize a spec back into the document format."""
    brackets = []
    for k, table in spec.brackets.items():
        for I, out in table.items():
            brackets.append({"inputs": [spec.names[i] for i in I],
                             "output": {spec.names[j]: _fmt(c) for j, c in sorted(out.items())}})
    return {"name": spec.name,
            "generators": [{"name": n, "degree": d} for n, d in zip(spec.names, spec.degrees)],
            "brackets": brackets}


def _fmt(c: Fraction) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


# ---------------------------------------------------------------- S(g[1])

def sym_degree(spec: LInftySpec, J: tuple) -> int:
    return sum(spec.degrees[i] for i in J)


def sym_basis(spec: LInftySpec, max_weight: int, min_weight: int = 0) -> list[tuple]:
    return spec.chart().monomials(max_weight, min_weight)


def weight_bound(spec: LInftySpec, weight_cap: int | None) -> int:
    chart = spec.chart()
    if weight_cap is not None:
        return weight_cap
    if all(chart.odd):
        return chart.dim
    raise InvalidInput("S(g[1]) is infinite here; pass an explicit weight cap")


def q_tilde(spec: LInftySpec, J: tuple) -> dict:
    """The coderivation sum_k (q_k bar * id) on e_J."""
    out: dict = {}
    for J1, J2, e in shuffle_split(J, spec.odd):
        if not J1:
            continue
        for j, c in spec.coefficient(J1).items():
            r = merge((j,), J2, spec.odd)
            if r is None:
                continue
            s, K = r
            add_into(out, K, e * s * c)
    return out


@lru_cache(maxsize=None)
def _fn_pair(m: tuple, J: tuple, degrees: tuple) -> int:
    """<x^m, e_J> from (f g)(X) = sum (-1)^{|g||X_1|} f(X_1) g(X_2) and x^i(e_j) = delta."""
    if len(m) != len(J):
        return 0
    if not m:
        return 1
    odd = tuple(d % 2 == 1 for d in degrees)
    head, rest = m[0], m[1:]
    grest = sum(degrees[i] for i in rest)
    total = 0
    for J1, J2, e in shuffle_split(J, odd):
        if len(J1) != 1 or J1[0] != head:
            continue
        s = e * sign(grest * degrees[J1[0]])
        total += s * _fn_pair(rest, J2, degrees)
    return total


def fn_pair(spec: LInftySpec, f: FormalFunction, J: tuple) -> Fraction:
    """<f, e_J> for f in C(g[1]) = Hom(S(g[1]), K)."""
    degs = tuple(-d for d in spec.degrees)
    out = Fraction(0)
    for m, c in f.terms.items():
        k = _fn_pair(m, J, degs)
        if k:
            out += k * c
    return out


# ---------------------------------------------------------------- modules

class CEModule:
    """A built-in module: trivial, adjoint, coadjoint or atiyah (M^v (x) M^v (x) M)."""

    TAGS = ("trivial", "adjoint", "coadjoint", "atiyah")

    def __init__(self, spec: LInftySpec, tag: str):
        if tag not in self.TAGS:
            raise InvalidInput(f"unknown module {tag!r}")
        self.spec = spec
        self.tag = tag
        n = spec.dim
        D = spec.degrees
        if tag == "trivial":
            self.basis = [()]
            self.degrees = [0]
        elif tag == "adjoint":
            self.basis = [(j,) for j in range(n)]
            self.degrees = [D[j] for j in range(n)]
        elif tag == "coadjoint":
            self.basis = [(j,) for j in range(n)]
            self.degrees = [-D[j] for j in range(n)]
        else:
            self.basis = [(a, b, c) for a in range(n) for b in range(n) for c in range(n)]
            self.degrees = [-D[a] - D[b] + D[c] for a, b, c in self.basis]
        self.index = {b: i for i, b in enumerate(self.basis)}
        self._cache: dict = {}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def act(self, J: tuple, b: int) -> dict[int, Fraction]:
        """rho(e_J (x) m_b) as {b': c}."""
        key = (J, b)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        spec = self.spec
        if self.tag == "trivial":
            out = {}
        elif self.tag == "adjoint":
            out = spec.coefficient(J + (b,))
        elif self.tag == "coadjoint":
            out = _coadjoint(spec, J, b)
        else:
            out = _tensor_action(spec, J, self.basis[b], self.index)
        out = {k: v for k, v in out.items() if v}
        self._cache[key] = out
        return out

    def __repr__(self):
        return f"CEModule({self.tag}, dim={self.dim})"


def _coadjoint(spec: LInftySpec, J: tuple, a: int) -> dict:
    """<rho(X (x) xi^a), e_m> = -<xi^a, rho(X (x) e_m)>.

    Any extra Koszul factor here is forced to be trivial by the degree
    constraint on nonzero structure constants, so the plain sign is used.
    """
    s = -1
    out = {}
    for m in range(spec.dim):
        c = spec.coefficient(J + (m,)).get(a)
        if c:
            out[m] = s * c
    return out


def _tensor_action(spec: LInftySpec, J: tuple, abc: tuple, index: dict) -> dict:
    """rho on xi^a (x) xi^b (x) e_c, each factor acted on in turn."""
    D = spec.degrees
    a, b, c = abc
    X = sym_degree(spec, J)
    out: dict = {}
    for a2, v in _coadjoint(spec, J, a).items():
        add_into(out, index[(a2, b, c)], v)
    s = sign((X + 1) * -D[a])
    for b2, v in _coadjoint(spec, J, b).items():
        add_into(out, index[(a, b2, c)], s * v)
    s = sign((X + 1) * (-D[a] - D[b]))
    for c2, v in spec.coefficient(J + (c,)).items():
        add_into(out, index[(a, b, c2)], s * v)
    return out


def check_module(module: CEModule, max_weight: int) -> tuple[bool, Any]:
    """rho((id (x) rho)(Delta (x) id) + Q~ (x) id) = 0 on e_J (x) m_b."""
    spec = module.spec
    for J in sym_basis(spec, max_weight):
        for b in range(module.dim):
            out: dict = {}
            for J1, J2, e in shuffle_split(J, spec.odd):
                s = e * sign(sym_degree(spec, J1))
                for b2, v in module.act(J2, b).items():
                    for b3, w in module.act(J1, b2).items():
                        add_into(out, b3, s * v * w)
            for K, v in q_tilde(spec, J).items():
                for b3, w in module.act(K, b).items():
                    add_into(out, b3, v * w)
            if out:
                return False, (J, module.basis[b], out)
    return True, None


# ---------------------------------------------------------------- cochains

class CECochain:
    def __init__(self, module: CEModule, values: Mapping[tuple, Fraction] | None = None):
        self.module = module
        self.values = {k: Fraction(v) for k, v in (values or {}).items() if v}

    def degree_of(self, key) -> int:
        J, b = key
        return self.module.degrees[b] - sym_degree(self.module.spec, J)

    def degrees(self) -> set[int]:
        return {self.degree_of(k) for k in self.values}

    def homogeneous_parts(self) -> dict[int, "CECochain"]:
        parts: dict[int, dict] = {}
        for k, v in self.values.items():
            parts.setdefault(self.degree_of(k), {})[k] = v
        return {d: CECochain(self.module, p) for d, p in sorted(parts.items())}

    def max_weight(self) -> int:
        return max((len(J) for J, _ in self.values), default=0)

    def evaluate(self, J: tuple) -> dict[int, Fraction]:
        return {b: v for (K, b), v in self.values.items() if K == J}

    def __eq__(self, other):
        if not isinstance(other, CECochain):
            return NotImplemented
        return self.values == other.values

    def __hash__(self):
        return hash(frozenset(self.values.items()))

    def __bool__(self):
        return bool(self.values)

    def __add__(self, other):
        out = dict(self.values)
        for k, v in other.values.items():
            add_into(out, k, v)
        return CECochain(self.module, out)

    def __sub__(self, other):
        return self + CECochain(other.module, {k: -v for k, v in other.values.items()})

    def truncated(self, weight: int) -> "CECochain":
        return CECochain(self.module, {k: v for k, v in self.values.items() if len(k[0]) <= weight})

    def __repr__(self):
        return f"CECochain({sorted(self.values.items())})"


def ce_differential(spec: LInftySpec, module: CEModule, F: CECochain,
                    weight_cap: int | None = None) -> CECochain:
    """d F = rho o (id (x) F) o Delta - (-1)^{|F|} F o Q~, evaluated up to the weight bound."""
    if spec is not module.spec and (spec.degrees, spec.brackets) != (module.spec.degrees, module.spec.brackets):
        raise InvalidInput("module belongs to a different spec")
    bound = F.max_weight() + max(spec.max_arity, 1)
    if weight_cap is not None:
        bound = min(bound, weight_cap)
    if all(spec.odd):
        bound = min(bound, spec.dim)
    out: dict = {}
    for deg, Fp in F.homogeneous_parts().items():
        vals: dict[tuple, dict] = {}
        for (J, b), v in Fp.values.items():
            vals.setdefault(J, {})[b] = v
        for I in sym_basis(spec, bound):
            for I1, I2, e in shuffle_split(I, spec.odd):
                val = vals.get(I2)
                if not val:
                    continue
                s = e * sign(deg * sym_degree(spec, I1))
                for b, v in val.items():
                    for b2, w in module.act(I1, b).items():
                        add_into(out, (I, b2), s * v * w)
            s = -sign(deg)
            for K, c in q_tilde(spec, I).items():
                val = vals.get(K)
                if val:
                    for b, v in val.items():
                        add_into(out, (I, b), s * c * v)
    return CECochain(module, out)


def constant_cochain(module: CEModule, b: int, c=1) -> CECochain:
    return CECochain(module, {((), b): to_scalar(c)})


def identify_vf(spec: LInftySpec, X: VectorField, module: CEModule | None = None) -> CECochain:
    """f d_i (plain left partial) -> (Y -> (-1)^{d_i} (-1)^{|e_i||Y|} <f,Y> e_i)."""
    module = module or CEModule(spec, "adjoint")
    chart = X.chart
    D = spec.degrees
    out: dict = {}
    for (m, (i,)), c in X.terms.items():
        w = len(m)
        for J in chart.monomials(w, w):
            k = _fn_pair(m, J, chart.degrees)
            if not k:
                continue
            s = sign(chart.degrees[i]) * sign(D[i] * sym_degree(spec, J))
            add_into(out, (J, i), s * k * c)
    return CECochain(module, out)


def pairing_frame(chart: Chart, i: int) -> VectorField:
    """The frame field matching the constant cochain e_i: (-1)^{d_i} d_i."""
    return VectorField.frame(chart, i).scaled(sign(chart.degrees[i]))


def closed_form_lambda(spec: LInftySpec, n: int, xs: tuple, module: CEModule | None = None) -> CECochain:
    """lambda_n(e_{x1}...e_{xn}) = sum_{k>=n} q_k(X . -) as a cochain (n >= 2);
    n = 1 gives d_CE of the constant cochain."""
    module = module or CEModule(spec, "adjoint")
    xs = tuple(xs)
    if n != len(xs) or n < 1:
        raise InvalidInput(f"closed_form_lambda needs exactly n = {n} >= 1 inputs")
    if n == 1:
        return ce_differential(spec, module, constant_cochain(module, xs[0]))
    out: dict = {}
    top = spec.max_arity - n
    if top < 0:
        return CECochain(module, {})
    for J in sym_basis(spec, top):
        for j, c in spec.coefficient(tuple(xs) + J).items():
            add_into(out, (J, j), c)
    return CECochain(module, out)


# ---------------------------------------------------------------- cohomology

def cochain_basis(module: CEModule, degree: int, max_weight: int) -> list[tuple]:
    spec = module.spec
    return [(J, b) for J in sym_basis(spec, max_weight) for b in range(module.dim)
            if module.degrees[b] - sym_degree(spec, J) == degree]


def _matrix(module: CEModule, src: list, dst: list, max_weight: int) -> list[list[Fraction]]:
    pos = {k: i for i, k in enumerate(dst)}
    cols = []
    for key in src:
        img = ce_differential(module.spec, module, CECochain(module, {key: 1}), max_weight)
        col = [Fraction(0)] * len(dst)
        for k, v in img.values.items():
            if len(k[0]) <= max_weight:
                col[pos[k]] = v
        cols.append(col)
    return [[cols[c][r] for c in range(len(src))] for r in range(len(dst))]


def ce_cohomology(spec: LInftySpec, module, degree: int, weight_cap: int | None = None) -> dict:
    """dim H^degree with representatives; approximate when the complex is infinite."""
    module = module if isinstance(module, CEModule) else CEModule(spec, module)
    tag = module.tag
    exact = all(spec.odd) and weight_cap is None
    w = weight_bound(spec, weight_cap)
    Cm = cochain_basis(module, degree - 1, w)
    C0 = cochain_basis(module, degree, w)
    Cp = cochain_basis(module, degree + 1, w)
    d0 = _matrix(module, C0, Cp, w)
    dm = _matrix(module, Cm, C0, w)
    r0 = linalg.rank(d0, len(C0))
    rm = linalg.rank(dm, len(Cm))
    kernel = linalg.nullspace(d0, len(C0))
    image = linalg.transpose(dm, len(Cm)) if Cm else []
    reps = linalg.independent_extension(image, kernel, len(C0))
    representatives = [CECochain(module, {C0[i]: v for i, v in enumerate(vec) if v}) for vec in reps]
    return {"module": tag, "degree": degree, "dimension": len(C0) - r0 - rm,
            "cochain_dimension": len(C0), "rank_out": r0, "rank_in": rm,
            "weight_cap": w, "exact": exact, "representatives": representatives}


def ce_square_zero(module: CEModule, max_weight: int) -> tuple[bool, Any]:
    """d o d = 0 on every basis cochain of weight <= max_weight."""
    spec = module.spec
    cap = max_weight + 2 * max(spec.max_arity, 1)
    if all(spec.odd):
        cap = min(cap, spec.dim)
    for J in sym_basis(spec, max_weight):
        for b in range(module.dim):
            F = CECochain(module, {(J, b): 1})
            dd = ce_differential(spec, module, ce_differential(spec, module, F, cap), cap)
            if dd:
                return False, ((J, module.basis[b]), dd)
    return True, None


# ---------------------------------------------------------------- Atiyah class

def atiyah_class_is_zero(spec: LInftySpec, conn: Connection, weight_cap: int | None = None) -> dict:
    """Solve At = Q(F) for a graded-symmetric degree-0 tensor F by exact linear algebra."""
    chart = conn.chart
    Q = q_from_spec(spec, chart)
    at = atiyah_cocycle(Q, conn)
    if at.is_zero():
        return {"zero": True, "witness": OneTwoTensor(chart, 0, {}), "certificate": None,
                "exact": True, "atiyah": at}
    exact = all(chart.odd) and weight_cap is None
    w = chart.dim if weight_cap is None and all(chart.odd) else weight_cap
    if w is None:
        raise InvalidInput("non-finite chart: pass a weight cap for the Atiyah class search")
    n = chart.dim
    d = chart.degrees
    unknowns = []
    for i in range(n):
        for j in range(i, n):
            if i == j and chart.odd[i]:
                continue
            for l in range(n):
                want = d[l] - d[i] - d[j]
                for m in chart.monomials(w):
                    if chart.mono_degree(m) == want:
                        unknowns.append((i, j, l, m))
    def tensor(i, j, l, m):
        v = VectorField(chart, {(m, (l,)): 1})
        vals = {(i, j): v}
        if i != j:
            vals[(j, i)] = v.scaled(sign(d[i] * d[j]))
        return OneTwoTensor(chart, 0, vals)
    images = [cQ_apply(Q, tensor(*u)) for u in unknowns]
    keys = set()
    for t in images + [at]:
        for (i, j), v in t.values.items():
            for (m, (l,)) in v.terms:
                keys.add((i, j, l, m))
    keys = sorted(keys)
    pos = {k: r for r, k in enumerate(keys)}
    rows = [[Fraction(0)] * len(unknowns) for _ in keys]
    for c, t in enumerate(images):
        for (i, j), v in t.values.items():
            for (m, (l,)), val in v.terms.items():
                rows[pos[(i, j, l, m)]][c] = val
    rhs = [Fraction(0)] * len(keys)
    for (i, j), v in at.values.items():
        for (m, (l,)), val in v.terms.items():
            rhs[pos[(i, j, l, m)]] = val
    sol, cert = linalg.solve(rows, rhs, len(unknowns))
    if sol is None:
        certificate = {keys[r]: y for r, y in enumerate(cert) if y}
        return {"zero": False, "witness": None, "certificate": certificate, "exact": exact, "atiyah": at}
    F = OneTwoTensor(chart, 0, {})
    for u, c in zip(unknowns, sol):
        if c:
            t = tensor(*u)
            vals = dict(F.values)
            for key, v in t.values.items():
                vals[key] = F.frame_value(*key) + v.scaled(c)
            F = OneTwoTensor(chart, 0, vals)
    return {"zero": True, "witness": F, "certificate": None, "exact": exact, "atiyah": at}


def witness_connection(conn: Connection, F: OneTwoTensor) -> Connection:
    """nabla' = nabla - F, whose Atiyah cocycle is At - Q(F)."""
    chart = conn.chart
    gamma = dict(conn.gamma)
    for (i, j), v in F.values.items():
        for l, f in v.components().items():
            g = gamma.get((l, i, j), FormalFunction(chart, {})) - f
            gamma[(l, i, j)] = g
    return Connection(chart, {k: g for k, g in gamma.items() if g}, "witness")
