"""Local equation systems attached to a terminally weighted tree.

Component ``e`` of the system of a tree with root ``o`` is

    sum over terminal b of  (prod of z_a over the path o < a <= b) * w_b_e

and the one-vertex tree gives ``w_o_e``.  Three independent constructions are
provided: the path-product formula, the recursion over the root's subtrees,
and a textual rewrite of the bracket notation.  They must agree exactly.
"""

from __future__ import annotations

from .poly import Poly, PolySystem, Var, parse_poly
from .tree import WeightedTree, classify, parse, tokenize

__all__ = [
    "phi_direct",
    "phi_inductive",
    "phi_subtree",
    "phi_bracket",
    "ambient_inventory",
    "EquationError",
]


class EquationError(ValueError):
    """The tree does not define an equation system."""


def _check(t: WeightedTree, n: int) -> None:
    if n < 1:
        raise EquationError("n must be positive")
    # all-zero weights is the unweighted shorthand o[a,b[c,d]]
    if any(t.weight.values()) and not classify(t).terminally_weighted:
        raise EquationError("equation systems need a terminally weighted tree")


def ambient_inventory(t: WeightedTree, n: int) -> frozenset[Var]:
    """Coordinates of the model space: z per non-root vertex, w per terminal and e."""
    zs = {Var.z(v) for v in t.non_root_vertices()}
    ws = {Var.w(b, e) for b in t.terminals() for e in range(1, n + 1)}
    return frozenset(zs | ws)


def phi_direct(t: WeightedTree, n: int) -> PolySystem:
    _check(t, n)
    comps = []
    for e in range(1, n + 1):
        total = Poly()
        for b in t.terminals():
            path = [a for a in [b, *t.ancestors(b)] if a != t.root]
            total = total + Poly.monomial([Var.z(a) for a in path] + [Var.w(b, e)])
        comps.append(total)
    return PolySystem(n, tuple(comps), ambient_inventory(t, n))


def phi_subtree(t: WeightedTree, v: str, e: int) -> Poly:
    """Component ``e`` of the system of the subtree hanging at ``v``."""
    if t.is_terminal(v):
        return Poly.var(Var.w(v, e))
    total = Poly()
    for c in t.children(v):
        total = total + Poly.var(Var.z(c)) * phi_subtree(t, c, e)
    return total


def phi_inductive(t: WeightedTree, n: int) -> PolySystem:
    _check(t, n)
    comps = tuple(phi_subtree(t, t.root, e) for e in range(1, n + 1))
    return PolySystem(n, comps, ambient_inventory(t, n))


def _rewrite(text: str, e: int) -> tuple[str, dict[str, Var]]:
    """Turn bracket text into an arithmetic expression for component ``e``.

    The root is dropped, a ghost ``a[...]`` becomes ``z_a*(...)``, a terminal
    ``b`` becomes ``z_b*w_b_e`` and commas become ``+``.
    """
    tokens = tokenize(text)
    # parse() records vertices in textual order, so ids line up with labels
    ids = iter(parse(text).weight)
    symbols: dict[str, Var] = {}

    def sym(v: Var) -> str:
        if symbols.setdefault(v.name, v) != v:
            raise EquationError(f"variable name clash on {v.name!r}")
        return v.name

    out: list[str] = []
    first = True
    for i, tok in enumerate(tokens):
        if tok.kind == "label":
            vid = next(ids)
            j = i + 1
            while tokens[j].kind == "weight":
                j += 1
            ghost = tokens[j].kind == "["
            if first:
                first = False
                if not ghost:
                    out.append(sym(Var.w(vid, e)))
                continue
            if ghost:
                out.append(sym(Var.z(vid)) + "*")
            else:
                out.append(f"{sym(Var.z(vid))}*{sym(Var.w(vid, e))}")
        elif tok.kind == "[":
            out.append("(")
        elif tok.kind == "]":
            out.append(")")
        elif tok.kind == ",":
            out.append("+")
    return "".join(out), symbols


def phi_bracket(text: str, n: int) -> PolySystem:
    """System built by rewriting the bracket string itself."""
    t = parse(text)
    _check(t, n)
    comps = []
    for e in range(1, n + 1):
        expr, symbols = _rewrite(text, e)
        comps.append(parse_poly(expr, symbols))
    return PolySystem(n, tuple(comps), ambient_inventory(t, n))
