import dataclasses
import json

import pytest

from wtree.blowup import (
    BlowupError,
    ChartVerificationError,
    blowup_charts,
    pi_locus,
    run_pipeline,
    singularity_type,
    verify_chart,
)
from wtree.enumeration import lambda_staged
from wtree.equations import phi_inductive
from wtree.poly import Poly, Var, is_monomial_times_unit_linear
from wtree.tree import canonical_form, classify, parse, to_bracket

EXAMPLE = "o[a(2),b[c(1),d(1)]]"


def form(text):
    return canonical_form(parse(text))


def test_pi_locus_cases():
    t = parse(EXAMPLE)
    locus = pi_locus(t, 2)
    assert not locus.is_empty
    assert {v.name for v in locus.variables} == {"z_a", "z_b"}
    assert pi_locus(parse("o[a[b(2)]]"), 2).is_empty
    assert pi_locus(parse("o[a(1),b(1),c(1)]"), 2).is_empty
    with pytest.raises(BlowupError):
        pi_locus(t, 1)
    with pytest.raises(BlowupError):
        pi_locus(parse("o[a(1),b[c[d(1),e(1)]]]"), 2)


def test_pi_locus_below_stage_raises():
    with pytest.raises(BlowupError):
        pi_locus(parse(EXAMPLE), 3)


def test_worked_example_charts():
    charts = blowup_charts(parse(EXAMPLE), 1)
    assert len(charts) == 2
    by_vertex = {c.chart_vertex: c for c in charts}
    ca, cb = by_vertex["a"], by_vertex["b"]
    assert to_bracket(ca.matched_tree) == "o[a(4)]"
    assert to_bracket(cb.matched_tree) == "o[b[a(2),c(1),d(1)]]"
    # u_a = 1: z_a (w_a + u_b (z_c w_c + z_d w_d))
    za, zb, zc, zd = (Poly.var(Var.z(v)) for v in "abcd")
    ua, ub = Poly.var(Var.u("a")), Poly.var(Var.u("b"))
    wa, wc, wd = (Poly.var(Var.w(v, 1)) for v in "acd")
    assert ca.raw_system[1] == za * (wa + ub * (zc * wc + zd * wd))
    # u_b = 1: z_b (u_a w_a + z_c w_c + z_d w_d)
    assert cb.raw_system[1] == zb * (ua * wa + zc * wc + zd * wd)
    assert ca.normalization_kind == "shift" and cb.normalization_kind == "rename"


@pytest.mark.parametrize("d", [2, 3, 4])
def test_chart_count_equals_br(d):
    for t in lambda_staged(d, 1):
        info = classify(t)
        if info.br == 2:
            charts = blowup_charts(t, 2)
            assert len(charts) == info.br
            matched = {canonical_form(c.matched_tree) for c in charts}
            for m in matched:
                br = classify(parse(m)).br
                assert br == 0 or br >= 3


def test_blowup_preconditions():
    with pytest.raises(BlowupError):
        blowup_charts(parse("o[a[b(2)]]"), 1)
    with pytest.raises(BlowupError):
        blowup_charts(parse("o[a(1),b[c[d(1),e(1)]]]"), 1)


def test_tampered_chart_is_rejected():
    chart = blowup_charts(parse(EXAMPLE), 1)[0]
    bad_raw = dataclasses.replace(
        chart,
        raw_system=chart.raw_system.substitute({Var.w("a", 1): Poly.var(Var.w("a", 1)) * 2}),
    )
    with pytest.raises(ChartVerificationError):
        verify_chart(bad_raw, 1)
    bad_tree = dataclasses.replace(chart, matched_tree=parse("o[a(2),b(2)]"))
    with pytest.raises(ChartVerificationError):
        verify_chart(bad_tree, 1)
    bad_kind = dataclasses.replace(chart, normalization_kind="twist")
    with pytest.raises(ChartVerificationError):
        verify_chart(bad_kind, 1)


def test_singularity_type():
    t = parse(EXAMPLE)
    assert canonical_form(singularity_type(t, [])) == canonical_form(t)
    assert canonical_form(singularity_type(t, {"a", "b", "c", "d"})) == form("o(4)")
    assert canonical_form(singularity_type(t, {"b"})) == form("o[a(2),c(1),d(1)]")


def test_pipeline_d2():
    report = run_pipeline(2, 1)
    assert sorted(report.final.forms()) == sorted(form(s) for s in ["o(2)", "o[a(2)]", "o[a[b(2)]]"])
    assert report.charts_verified == 4  # o[a,b] and o[v[a,b]], two charts each
    assert report.certificates_total
    literal = run_pipeline(2, 1, literal=True)
    assert sorted(literal.final.forms()) == sorted(form(s) for s in ["o[a(2)]", "o[a[b(2)]]"])


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("n", [1, 2])
def test_pipeline_certificates(d, n):
    report = run_pipeline(d, n)
    assert report.certificates_total
    for term in report.terminal:
        info = classify(term.tree)
        assert info.path_tree
        cert = term.certificate
        assert len(cert.monomial) == len(info.trunk) - 1
        assert len(set(cert.monomial)) == len(cert.monomial)
        assert all(v.kind == "z" for v in cert.monomial)
        assert [v.slot for v in cert.w_vars] == list(range(1, n + 1))
    # every tree with a branch vertex fails the certificate
    for stage in report.stages:
        for blown in stage.blown:
            assert is_monomial_times_unit_linear(phi_inductive(blown.source, n)) is None


def test_pipeline_chart_totals():
    assert [run_pipeline(d, 2).charts_verified for d in range(1, 5)] == [0, 4, 17, 62]


def test_pipeline_json_is_plain_data():
    text = json.dumps(run_pipeline(3, 1).to_json(), sort_keys=True)
    assert json.loads(text)["d"] == 3
