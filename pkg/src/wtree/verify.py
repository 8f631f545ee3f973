"""Named property sweeps, each returning every counterexample it finds."""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass, field
from typing import Callable

from .blowup import BlowupError, ChartVerificationError, pi_locus, run_pipeline
from .enumeration import lambda_trees, oracle_lambda, simple_trees, staged_sequence
from .equations import phi_bracket, phi_direct, phi_inductive
from .ops import collapse, collapse_at_support, mon
from .poly import is_monomial_times_unit_linear
from .tree import (
    canonical_form,
    classify,
    isomorphism,
    parse,
    random_isomorphic_copy,
    random_tree,
    to_bracket,
)

__all__ = ["SuiteResult", "SUITES", "run_suite", "seed_from_env"]


@dataclass
class SuiteResult:
    name: str
    d: int
    n: int
    checked: int = 0
    counterexamples: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def check(self, condition: bool, what: str) -> None:
        self.checked += 1
        if not condition:
            self.counterexamples.append(what)

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "d": self.d,
            "n": self.n,
            "checked": self.checked,
            "ok": self.ok,
            "counterexamples": self.counterexamples,
        }


def seed_from_env(default: int = 0) -> int:
    raw = os.environ.get("WTREE_SEED")
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw.strip())
    except ValueError:
        raise ValueError(f"WTREE_SEED must be a decimal integer, got {raw!r}") from None


def suite_roundtrip(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("roundtrip", d, n)
    rng = random.Random(seed)
    for _ in range(1000):
        t = random_tree(rng, max_vertices=12, max_weight=d)
        text = to_bracket(t)
        res.check(canonical_form(parse(text)) == canonical_form(t), f"parse(print) changed {text}")
        canon = canonical_form(t)
        res.check(to_bracket(parse(canon)) == canon, f"print(parse) changed {canon}")
        copy = random_isomorphic_copy(t, rng)
        res.check(canonical_form(copy) == canon, f"canonical form not invariant on {canon}")
    trees = [t for k in range(1, d + 1) for t in lambda_trees(k)]
    for a, b in itertools.combinations(trees, 2):
        same = canonical_form(a) == canonical_form(b)
        res.check(same == (isomorphism(a, b) is not None), f"iso mismatch {a} / {b}")
    return res


def suite_mon1(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("mon1", d, n)
    for t in simple_trees(d, max_trunk=2):
        info = classify(t)
        for m in mon(t):
            br = classify(m).br
            res.check(br == 0 or br >= info.br + 1, f"mon {t} -> {m} (br {info.br} -> {br})")
            res.check(classify(m).simple, f"mon {t} -> {m} is not simple")
        if info.branch_vertex is not None:
            for a in t.children(info.branch_vertex):
                c = collapse(t, a)
                br = classify(c).br
                res.check(br == 0 or br >= info.br + 1, f"collapse {t} at {a} -> {c}")
    return res


def suite_mon2(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("mon2", d, n)
    for dd in range(1, d + 1):
        stages = staged_sequence(dd)
        for k, stage in enumerate(stages, start=1):
            for t in stage:
                info = classify(t)
                res.check(
                    info.br == 0 or k + 1 <= info.br <= dd,
                    f"d={dd} k={k}: {t} has br={info.br}",
                )
                res.check(info.simple, f"d={dd} k={k}: {t} not simple")
        for t in stages[-1]:
            res.check(classify(t).path_tree, f"d={dd}: final {t} is not a path tree")
    return res


def suite_phi_equiv(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("phi-equiv", d, n)
    for dd in range(1, d + 1):
        for t in lambda_trees(dd):
            for nn in range(1, n + 1):
                a = phi_direct(t, nn)
                b = phi_inductive(t, nn)
                c = phi_bracket(to_bracket(t), nn)
                res.check(a.components == b.components == c.components, f"{t} n={nn}")
                for e in range(1, nn + 1):
                    p = a[e]
                    res.check(len(p) == len(t.terminals()), f"{t}: term count")
                    for m, coef in p.terms.items():
                        ws = [v for v, _ in m if v.kind == "w"]
                        b_vertex = ws[0].vertex if ws else None
                        ok = (
                            coef == 1
                            and len(ws) == 1
                            and sum(x for _, x in m) == t.depth(b_vertex) + 1
                        )
                        res.check(ok, f"{t}: bad monomial {m}")
    return res


def suite_justk(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("justk", d, n)
    for dd in range(1, d + 1):
        seen = set()
        for stage in staged_sequence(dd):
            for t in stage:
                if canonical_form(t) in seen:
                    continue
                seen.add(canonical_form(t))
                info = classify(t)
                non_root = t.non_root_vertices()
                for k in range(2, dd + 1):
                    if 0 < info.br < k:
                        continue
                    locus = pi_locus(t, k)
                    if info.br == k:
                        kids = set(t.children(info.branch_vertex))
                        res.check(
                            {v.vertex for v in locus.variables} == kids and not locus.is_empty,
                            f"{t} k={k}: center {locus}",
                        )
                    else:
                        res.check(locus.is_empty, f"{t} k={k}: center should be empty")
                    if len(non_root) > 10:
                        continue
                    for r in range(len(non_root) + 1):
                        for support in itertools.combinations(non_root, r):
                            on_center = (not locus.is_empty) and not (
                                set(support) & {v.vertex for v in locus.variables}
                            )
                            br_x = classify(collapse_at_support(t, support)).br
                            res.check(
                                on_center == (br_x == k),
                                f"{t} k={k} support={support}: br={br_x}",
                            )
    return res


def suite_zgk(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("zgk", d, n)
    for dd in range(1, d + 1):
        for nn in range(1, n + 1):
            try:
                report = run_pipeline(dd, nn)
            except (ChartVerificationError, BlowupError) as exc:
                res.check(False, f"d={dd} n={nn}: {exc}")
                continue
            for stage in report.stages:
                for blown in stage.blown:
                    br = classify(blown.source).br
                    res.check(len(blown.charts) == br, f"{blown.source}: chart count")
                    for chart in blown.charts:
                        br_m = classify(chart.matched_tree).br
                        res.check(
                            br_m == 0 or br_m >= br + 1,
                            f"{blown.source} chart {chart.chart_index}: br {br_m}",
                        )
    return res


def suite_nc(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("nc", d, n)
    for dd in range(1, d + 1):
        for nn in range(1, n + 1):
            report = run_pipeline(dd, nn)
            for term in report.terminal:
                cert = term.certificate
                r = len(classify(term.tree).trunk) - 1
                res.check(
                    cert is not None and len(cert.monomial) == r,
                    f"d={dd} n={nn}: {term.tree} certificate {cert}",
                )
            for stage in report.stages:
                for blown in stage.blown:
                    cert = is_monomial_times_unit_linear(phi_inductive(blown.source, nn))
                    res.check(cert is None, f"branch tree {blown.source} has a certificate")
    return res


def suite_oracle(d: int, n: int, seed: int) -> SuiteResult:
    res = SuiteResult("oracle", d, n)
    for dd in range(1, d + 1):
        direct = lambda_trees(dd).forms()
        brute = oracle_lambda(dd, 2 * dd + 1).forms()
        res.check(direct == brute, f"d={dd}: {sorted(set(direct) ^ set(brute))}")
    return res


SUITES: dict[str, Callable[[int, int, int], SuiteResult]] = {
    "roundtrip": suite_roundtrip,
    "mon1": suite_mon1,
    "mon2": suite_mon2,
    "phi-equiv": suite_phi_equiv,
    "justk": suite_justk,
    "zgk": suite_zgk,
    "nc": suite_nc,
    "oracle": suite_oracle,
}


def run_suite(name: str, d: int = 3, n: int = 2, seed: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    return SUITES[name](d, n, seed_from_env() if seed is None else seed)
