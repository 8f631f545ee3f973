"""Chart-wise blowup of the model along the locus where the branch children's
z-coordinates vanish, with every chart checked against the equation system
of the corresponding monoidal transform.

For a simple tree with trunk ``o < v1 < ... < vr`` and branch children
``a1..ak`` the chart ``u_{a_i} = 1`` substitutes ``z_{a_j} -> z_{a_i} u_{a_j}``
(``j != i``).  The resulting system is matched to the system of
``advance(t, a_i)`` either by shifting ``w_{a_i,e}`` (terminal ``a_i``) or by
renaming ``z_{a_j}`` to ``u_{a_j}`` (non-terminal ``a_i``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from .equations import ambient_inventory, phi_inductive, phi_subtree
from .enumeration import TreeSet, lambda_trees
from .ops import advance, collapse_at_support, mon
from .poly import Certificate, Poly, PolySystem, Var, is_monomial_times_unit_linear, substitute
from .tree import WeightedTree, canonical_form, classify

__all__ = [
    "BlowupError",
    "ChartVerificationError",
    "CenterLocus",
    "BlowupChart",
    "StageReport",
    "PipelineReport",
    "pi_locus",
    "blowup_charts",
    "singularity_type",
    "run_pipeline",
]


class BlowupError(ValueError):
    """Blowup requested outside its preconditions."""


class ChartVerificationError(AssertionError):
    """A chart identity failed; this is a bug, never repaired silently."""


@dataclass(frozen=True)
class CenterLocus:
    """The blowup center as the set of z-coordinates that vanish on it.

    ``status`` is ``"center"`` when ``br = k``; ``"empty"`` when the center
    is empty (``br = 0`` or ``br > k``).
    """

    status: str
    variables: tuple[Var, ...] = ()

    @property
    def is_empty(self) -> bool:
        return self.status == "empty"


def pi_locus(t: WeightedTree, k: int) -> CenterLocus:
    if k < 2:
        raise BlowupError("the center is defined for k >= 2")
    info = classify(t)
    if not (info.simple and info.terminally_weighted):
        raise BlowupError("the center needs a simple terminally weighted tree")
    if info.br == 0 or info.br > k:
        return CenterLocus("empty")
    if info.br < k:
        raise BlowupError(f"br = {info.br} is below k = {k}")
    kids = t.sorted_children(info.branch_vertex)
    return CenterLocus("center", tuple(Var.z(a) for a in kids))


@dataclass(frozen=True)
class BlowupChart:
    source: WeightedTree
    chart_index: int  # 1-based position among the sorted branch children
    chart_vertex: str  # the branch child a_i with u_{a_i} = 1
    substitution: Mapping[Var, Poly]
    normalization_kind: str  # "shift" or "rename"
    normalization: Mapping[Var, Poly]
    raw_system: PolySystem
    matched_tree: WeightedTree
    variable_map: Mapping[Var, Var]

    def to_json(self) -> dict[str, Any]:
        return {
            "i": self.chart_index,
            "vertex": self.chart_vertex,
            "matched": canonical_form(self.matched_tree),
            "substitution": _bindings_json(self.substitution),
            "normalization": {
                "kind": self.normalization_kind,
                "map": _bindings_json(self.normalization),
            },
            "variable_map": {
                k.name: v.name for k, v in sorted(self.variable_map.items(), key=lambda kv: kv[0].sort_key)
            },
            "raw_system": [p.to_text() for p in self.raw_system],
        }


def _bindings_json(bindings: Mapping[Var, Poly]) -> dict[str, str]:
    return {v.name: p.to_text() for v, p in sorted(bindings.items(), key=lambda kv: kv[0].sort_key)}


def _prod_z(vertices) -> Poly:
    return Poly.monomial(Var.z(v) for v in vertices)


def blowup_charts(t: WeightedTree, n: int) -> list[BlowupChart]:
    """All charts of the blowup of the model of ``t`` along its center.

    Each chart is verified before being returned; see :func:`verify_chart`.
    """
    info = classify(t)
    if not (info.simple and info.terminally_weighted):
        raise BlowupError("blowups need a simple terminally weighted tree")
    if info.br < 2:
        raise BlowupError("blowups need a branch vertex (br >= 2)")
    trunk_z = _prod_z(info.trunk[1:])
    kids = t.sorted_children(info.branch_vertex)
    source_sys = phi_inductive(t, n)
    charts = []
    for i, ai in enumerate(kids, start=1):
        others = [a for a in kids if a != ai]
        substitution = {Var.z(a): Poly.var(Var.z(ai)) * Poly.var(Var.u(a)) for a in others}
        raw_comps = tuple(substitute(p, substitution) for p in source_sys)
        inventory = (ambient_inventory(t, n) - {Var.z(a) for a in others}) | {
            Var.u(a) for a in others
        }
        raw = PolySystem(n, raw_comps, inventory)
        matched = advance(t, ai)
        if t.is_terminal(ai):
            kind = "shift"
            normalization = {
                Var.w(ai, e): Poly.var(Var.w(ai, e))
                + sum((Poly.var(Var.u(a)) * phi_subtree(t, a, e) for a in others), Poly())
                for e in range(1, n + 1)
            }
            variable_map = {v: v for v in ambient_inventory(matched, n)}
        else:
            kind = "rename"
            normalization = {Var.u(a): Poly.var(Var.z(a)) for a in others}
            variable_map = {
                v: (Var.u(v.vertex) if v.kind == "z" and v.vertex in others else v)
                for v in ambient_inventory(matched, n)
            }
        chart = BlowupChart(
            source=t,
            chart_index=i,
            chart_vertex=ai,
            substitution=substitution,
            normalization_kind=kind,
            normalization=normalization,
            raw_system=raw,
            matched_tree=matched,
            variable_map=variable_map,
        )
        verify_chart(chart, n, trunk_z)
        charts.append(chart)
    return charts


def verify_chart(chart: BlowupChart, n: int, trunk_z: Poly | None = None) -> None:
    """Check the chart identities as exact polynomial equalities.

    1. the raw system is the substituted source system, and has the
       ``(z_trunk) z_{a_i} (phi_i + sum_j u_j phi_j)`` shape;
    2. the matched tree's system, pushed through ``variable_map`` and the
       normalization, is the raw system;
    3. the normalization is invertible (unit triangular shift or a renaming).
    """
    t = chart.source
    info = classify(t)
    if trunk_z is None:
        trunk_z = _prod_z(info.trunk[1:])
    ai = chart.chart_vertex
    others = [a for a in t.children(info.branch_vertex) if a != ai]

    def fail(msg: str) -> ChartVerificationError:
        return ChartVerificationError(f"{canonical_form(t)} chart {chart.chart_index}: {msg}")

    source_sys = phi_inductive(t, n)
    for e in range(1, n + 1):
        if substitute(source_sys[e], chart.substitution) != chart.raw_system[e]:
            raise fail(f"substitution does not give the raw system (e={e})")
        shape = trunk_z * Poly.var(Var.z(ai)) * (
            phi_subtree(t, ai, e)
            + sum((Poly.var(Var.u(a)) * phi_subtree(t, a, e) for a in others), Poly())
        )
        if shape != chart.raw_system[e]:
            raise fail(f"raw system is not of the factored chart shape (e={e})")

    if canonical_form(chart.matched_tree) not in {canonical_form(m) for m in mon(t)}:
        raise fail("matched tree is not a monoidal transform")
    expected = phi_inductive(chart.matched_tree, n)
    if set(chart.variable_map) != expected.inventory:
        raise fail("variable map does not cover the matched system's coordinates")
    images = list(chart.variable_map.values())
    if len(set(images)) != len(images):
        raise fail("variable map is not injective")
    if not set(images) <= chart.raw_system.inventory:
        raise fail("variable map leaves the chart coordinates")
    pushed = expected.substitute({v: Poly.var(w) for v, w in chart.variable_map.items()})

    if chart.normalization_kind == "shift":
        keys = set(chart.normalization)
        for v, p in chart.normalization.items():
            rest = p - Poly.var(v)
            if rest.variables() & keys:
                raise fail(f"shift of {v.name} is not unit triangular")
        final = pushed.substitute(chart.normalization)
    elif chart.normalization_kind == "rename":
        if set(images) != chart.raw_system.inventory:
            raise fail("renaming chart must be a bijection onto the chart coordinates")
        targets = [p.variables() for p in chart.normalization.values()]
        if any(len(p) != 1 or len(vs) != 1 for p, vs in zip(chart.normalization.values(), targets)):
            raise fail("renaming must send variables to variables")
        final = pushed
        back = chart.raw_system.substitute(chart.normalization)
        if back.components != expected.components:
            raise fail("renamed raw system is not the matched system")
    else:
        raise fail(f"unknown normalization {chart.normalization_kind!r}")
    if final.components != chart.raw_system.components:
        raise fail("matched system does not reproduce the raw system")


def singularity_type(t: WeightedTree, support) -> WeightedTree:
    """Tree classifying the local model where exactly the z_a, a in support, are non-zero."""
    return collapse_at_support(t, support)


# ---------------------------------------------------------------------------
# the staged pipeline


@dataclass(frozen=True)
class BlownTree:
    source: WeightedTree
    charts: tuple[BlowupChart, ...]

    def to_json(self) -> dict[str, Any]:
        return {"source": canonical_form(self.source), "charts": [c.to_json() for c in self.charts]}


@dataclass(frozen=True)
class StageReport:
    k: int
    survivors: tuple[WeightedTree, ...]
    blown: tuple[BlownTree, ...]
    members: TreeSet

    def to_json(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "survivors": [canonical_form(t) for t in self.survivors],
            "blown": [b.to_json() for b in self.blown],
            "members": self.members.forms(),
        }


@dataclass(frozen=True)
class TerminalCertificate:
    tree: WeightedTree
    certificate: Certificate | None

    def to_json(self) -> dict[str, Any]:
        cert = self.certificate
        return {
            "tree": canonical_form(self.tree),
            "monomial": None if cert is None else [v.name for v in cert.monomial],
            "w_vars": None if cert is None else [v.name for v in cert.w_vars],
        }


@dataclass(frozen=True)
class PipelineReport:
    d: int
    n: int
    initial: TreeSet
    stages: tuple[StageReport, ...]
    terminal: tuple[TerminalCertificate, ...]
    literal: bool = False
    charts_verified: int = field(default=0)

    @property
    def final(self) -> TreeSet:
        return self.stages[-1].members if self.stages else self.initial

    @property
    def certificates_total(self) -> bool:
        return all(c.certificate is not None for c in self.terminal)

    def to_json(self) -> dict[str, Any]:
        return {
            "d": self.d,
            "n": self.n,
            "literal_staging": self.literal,
            "initial": self.initial.forms(),
            "stages": [s.to_json() for s in self.stages],
            "charts_verified": self.charts_verified,
            "terminal": [c.to_json() for c in self.terminal],
        }


def run_pipeline(d: int, n: int, literal: bool = False) -> PipelineReport:
    """Blow up stage by stage, ``k = 2..d``, verifying every chart.

    At stage ``k`` each tree with ``br = k`` is replaced by the matched trees
    of its charts; trees with ``br > k`` and path trees are carried over
    (path trees are dropped when ``literal`` is set).
    """
    if d < 1:
        raise BlowupError("d must be at least 1")
    if n < 1:
        raise BlowupError("n must be at least 1")
    initial = lambda_trees(d)
    current = initial
    stages = []
    verified = 0
    for k in range(2, d + 1):
        survivors: list[WeightedTree] = []
        blown: list[BlownTree] = []
        produced: list[WeightedTree] = []
        for t in current:
            br = classify(t).br
            if br >= k + 1 or (br == 0 and not literal):
                survivors.append(t)
            elif br == k:
                charts = blowup_charts(t, n)
                verified += len(charts)
                blown.append(BlownTree(t, tuple(charts)))
                produced.extend(c.matched_tree for c in charts)
            elif br:
                raise BlowupError(f"{canonical_form(t)} has br = {br} below stage {k}")
        current = TreeSet.of(d, survivors + produced, k)
        stages.append(StageReport(k, tuple(survivors), tuple(blown), current))
    terminal = tuple(
        TerminalCertificate(t, is_monomial_times_unit_linear(phi_inductive(t, n))) for t in current
    )
    return PipelineReport(d, n, initial, tuple(stages), terminal, literal, verified)
