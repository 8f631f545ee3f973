"""Exact sparse multivariate polynomials over the integers.

Variables are ``z_a`` (one per non-root vertex), ``w_b_e`` (terminal vertex
``b``, component ``e``) and ``u_a`` (blowup chart coordinates).  A monomial
is a sorted tuple of ``(Var, exponent)`` pairs; a :class:`Poly` maps
monomials to non-zero integer coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator, Mapping, NamedTuple, Union

__all__ = [
    "Var",
    "Poly",
    "PolySystem",
    "Certificate",
    "substitute",
    "parse_poly",
    "is_monomial_times_unit_linear",
]

_KIND_ORDER = {"z": 0, "w": 1, "u": 2}


class Var(NamedTuple):
    kind: str  # "z", "w" or "u"
    vertex: str
    slot: int = 0

    @classmethod
    def z(cls, vertex: str) -> Var:
        return cls("z", vertex)

    @classmethod
    def w(cls, vertex: str, e: int) -> Var:
        return cls("w", vertex, e)

    @classmethod
    def u(cls, vertex: str, j: int = 0) -> Var:
        return cls("u", vertex, j)

    @property
    def sort_key(self) -> tuple[int, str, int]:
        return (_KIND_ORDER[self.kind], self.vertex, self.slot)

    @property
    def name(self) -> str:
        if self.kind == "w":
            return f"w_{self.vertex}_{self.slot}"
        return f"{self.kind}_{self.vertex}"

    def __str__(self) -> str:
        return self.name


Monomial = tuple  # tuple[tuple[Var, int], ...], sorted by Var.sort_key


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items(), key=lambda item: item[0].sort_key))


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _grlex(m: Monomial) -> tuple:
    # descending total degree, then lexicographic in the variable order
    return (-_mono_degree(m), tuple((v.sort_key, -e) for v, e in m))


Coercible = Union["Poly", int]


class Poly:
    """Immutable integer polynomial; arithmetic returns new instances."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        self._terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash: int | None = None

    @classmethod
    def const(cls, c: int) -> Poly:
        return cls({(): c})

    @classmethod
    def var(cls, v: Var) -> Poly:
        return cls({((v, 1),): 1})

    @classmethod
    def monomial(cls, variables: Iterable[Var], coef: int = 1) -> Poly:
        m: Monomial = ()
        for v in variables:
            m = _mono_mul(m, ((v, 1),))
        return cls({m: coef})

    @staticmethod
    def _coerce(x: Coercible) -> Poly:
        if isinstance(x, Poly):
            return x
        if isinstance(x, int):
            return Poly.const(x)
        return NotImplemented

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return self._terms

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        return sorted(self._terms.items(), key=lambda item: _grlex(item[0]))

    def is_zero(self) -> bool:
        return not self._terms

    def variables(self) -> frozenset[Var]:
        return frozenset(v for m in self._terms for v, _ in m)

    def degree(self) -> int:
        return max((_mono_degree(m) for m in self._terms), default=-1)

    def __len__(self) -> int:
        return len(self._terms)

    def __add__(self, other: Coercible) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: Coercible) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Coercible) -> Poly:
        return (-self) + other

    def __mul__(self, other: Coercible) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[Monomial, int] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative exponent")
        result = Poly.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def substitute(self, bindings: Mapping[Var, Poly]) -> Poly:
        return substitute(self, bindings)

    def evaluate(self, point: Mapping[Var, int]) -> int:
        total = 0
        for m, c in self._terms.items():
            term = c
            for v, e in m:
                term *= point[v] ** e
            total += term
        return total

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [v.name if e == 1 else f"{v.name}^{e}" for v, e in m]
            if not factors:
                body = str(abs(c))
            elif abs(c) == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(abs(c))] + factors)
            sign = "-" if c < 0 else "+"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def to_json(self) -> list[dict[str, Any]]:
        return [
            {"coef": c, "monomial": {v.name: e for v, e in m}} for m, c in self.sorted_terms()
        ]

    @classmethod
    def from_json(cls, data: Iterable[Mapping[str, Any]], symbols: Mapping[str, Var]) -> Poly:
        out = Poly()
        for term in data:
            out = out + Poly.monomial(
                [symbols[name] for name, e in term["monomial"].items() for _ in range(e)],
                term["coef"],
            )
        return out

    def __repr__(self) -> str:
        return f"Poly({self.to_text()!r})"

    __str__ = to_text


def substitute(p: Poly, bindings: Mapping[Var, Poly]) -> Poly:
    """Simultaneous substitution of variables by polynomials, fully expanded."""
    powers: dict[tuple[Var, int], Poly] = {}
    out = Poly()
    for m, c in p.terms.items():
        term = Poly.const(c)
        for v, e in m:
            if v not in bindings:
                term = term * Poly({((v, e),): 1})
                continue
            key = (v, e)
            if key not in powers:
                powers[key] = bindings[v] ** e
            term = term * powers[key]
        out = out + term
    return out


_EXPR_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def parse_poly(text: str, symbols: Mapping[str, Var]) -> Poly:
    """Parse ``+ - * ^`` and parentheses over integer constants and named vars.

    ``symbols`` maps identifiers to variables; unknown identifiers are errors.
    """
    tokens: list[tuple[str, str, int]] = []
    for m in _EXPR_TOKEN.finditer(text):
        if m.group(1):
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3):
            tokens.append(("op", m.group(3), m.start(3)))
    tokens.append(("end", "", len(text)))
    pos = 0

    def fail(msg: str) -> ValueError:
        return ValueError(f"{msg} at position {tokens[pos][2]} in {text!r}")

    def peek(op: str) -> bool:
        return tokens[pos][0] == "op" and tokens[pos][1] == op

    def expr() -> Poly:
        nonlocal pos
        sign = 1
        if peek("-"):
            pos += 1
            sign = -1
        acc = term() * sign
        while peek("+") or peek("-"):
            negate = tokens[pos][1] == "-"
            pos += 1
            t = term()
            acc = acc - t if negate else acc + t
        return acc

    def term() -> Poly:
        nonlocal pos
        acc = power()
        while peek("*"):
            pos += 1
            acc = acc * power()
        return acc

    def power() -> Poly:
        nonlocal pos
        base = atom()
        if peek("^"):
            pos += 1
            if tokens[pos][0] != "int":
                raise fail("expected an integer exponent")
            base = base ** int(tokens[pos][1])
            pos += 1
        return base

    def atom() -> Poly:
        nonlocal pos
        kind, val, _ = tokens[pos]
        if kind == "int":
            pos += 1
            return Poly.const(int(val))
        if kind == "name":
            if val not in symbols:
                raise fail(f"unknown variable {val!r}")
            pos += 1
            return Poly.var(symbols[val])
        if peek("("):
            pos += 1
            inner = expr()
            if not peek(")"):
                raise fail("expected ')'")
            pos += 1
            return inner
        raise fail("unexpected token")

    result = expr()
    if tokens[pos][0] != "end":
        raise fail("trailing input")
    return result


@dataclass(frozen=True)
class PolySystem:
    """``n`` polynomial equations ``components[e-1] = 0`` on a coordinate inventory."""

    n: int
    components: tuple[Poly, ...]
    inventory: frozenset[Var] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if len(self.components) != self.n:
            raise ValueError(f"expected {self.n} components, got {len(self.components)}")
        used = frozenset().union(*(p.variables() for p in self.components))
        if not self.inventory:
            object.__setattr__(self, "inventory", used)
        elif not used <= self.inventory:
            missing = sorted(v.name for v in used - self.inventory)
            raise ValueError(f"variables outside the inventory: {missing}")

    def __getitem__(self, e: int) -> Poly:
        """Component ``e`` (1-based)."""
        return self.components[e - 1]

    def substitute(self, bindings: Mapping[Var, Poly]) -> PolySystem:
        comps = tuple(substitute(p, bindings) for p in self.components)
        return PolySystem(self.n, comps)

    def variables(self) -> frozenset[Var]:
        return frozenset().union(*(p.variables() for p in self.components))

    def sorted_inventory(self) -> list[Var]:
        return sorted(self.inventory, key=lambda v: v.sort_key)

    def zero_locus_stratum(self) -> dict[Var, int]:
        """The deepest stratum: every ``z`` coordinate set to zero."""
        return {v: 0 for v in self.sorted_inventory() if v.kind == "z"}

    def same_equations(self, other: PolySystem) -> bool:
        return self.components == other.components

    def to_text(self) -> list[str]:
        return [p.to_text() for p in self.components]

    def to_json(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "components": [p.to_json() for p in self.components],
            "inventory": [v.name for v in self.sorted_inventory()],
        }

    def __iter__(self) -> Iterator[Poly]:
        return iter(self.components)


@dataclass(frozen=True)
class Certificate:
    """Normal-crossing shape: component ``e`` equals ``monomial * w_vars[e-1]``."""

    monomial: tuple[Var, ...]
    w_vars: tuple[Var, ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "monomial": [v.name for v in self.monomial],
            "w_vars": [v.name for v in self.w_vars],
        }


def is_monomial_times_unit_linear(sys: PolySystem) -> Certificate | None:
    """Certificate when every component is ``M * w`` for one common squarefree
    z-monomial ``M`` and pairwise distinct single w-variables; else None."""
    common: tuple[Var, ...] | None = None
    ws: list[Var] = []
    for p in sys.components:
        if len(p) != 1:
            return None
        ((m, c),) = p.terms.items()
        if c not in (1, -1) or any(e != 1 for _, e in m):
            return None
        zs = tuple(v for v, _ in m if v.kind == "z")
        rest = [v for v, _ in m if v.kind != "z"]
        if len(rest) != 1 or rest[0].kind != "w":
            return None
        if common is None:
            common = zs
        elif zs != common:
            return None
        ws.append(rest[0])
    if common is None or len(set(ws)) != len(ws):
        return None
    return Certificate(common, tuple(ws))
