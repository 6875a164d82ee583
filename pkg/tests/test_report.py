import csv
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from landmark_metrics import InputError, MetricRecord, aggregate, rank_variants, ranking_divergence
from landmark_metrics.io import read_report_csv, write_report_csv
from landmark_metrics.report import Aggregate, summarize


def rec(value, case="c0", variant="A", strategy="point", method="slice", metric="d_ant"):
    return MetricRecord(case, variant, strategy, method, metric, value)


def test_sample_std():
    a = summarize([1.0, 2.0, 3.0])
    assert (a.mean, a.std, a.na_count, a.n) == (2.0, 1.0, 0, 3)
    assert a.format() == "2.00±1.00"


def test_all_na_and_singleton():
    a = summarize([None, None])
    assert a.mean is None and a.std is None and a.na_count == 2 == a.n
    assert a.format() == ""
    b = summarize([4.2])
    assert (b.mean, b.std) == (4.2, 0.0)


@pytest.mark.parametrize("mean,std,text", [(5.92, 4.83, "5.92±4.83"), (3.33, 3.47, "3.33±3.47")])
def test_table_rendering(mean, std, text):
    assert Aggregate(mean, std, 0, 100).format() == text


def test_unknown_metric_rejected():
    with pytest.raises(InputError):
        rec(1.0, metric="dice")


values = st.lists(st.one_of(st.none(), st.floats(-1e3, 1e3)), min_size=1, max_size=20)


@given(values, st.randoms())
def test_aggregate_permutation_invariant(vals, rnd):
    recs = [rec(v, case=f"c{i}") for i, v in enumerate(vals)]
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    assert aggregate(recs).aggregates == aggregate(shuffled).aggregates


@given(values)
def test_removing_na_only_changes_na_count(vals):
    with_na = summarize(vals + [None])
    without = summarize(vals)
    assert (with_na.mean, with_na.std) == (without.mean, without.std)
    assert with_na.na_count == without.na_count + 1


def report_of(means):
    recs = []
    for variant, vals in means.items():
        for i, v in enumerate(vals):
            recs.append(rec(v, case=f"c{i}", variant=variant))
            recs.append(rec(None if v is None else 1 - v / 100, case=f"c{i}", variant=variant, method="", metric="tpr_ant"))
    return aggregate(recs)


def test_rank_directions():
    r = report_of({"A": [5.0], "B": [4.0]})
    assert rank_variants(r, "d_ant", "point", "slice") == ["B", "A"]
    assert rank_variants(r, "d_ant", "point", "slice", direction="higher_better") == ["A", "B"]
    assert rank_variants(r, "tpr_ant", "point") == ["B", "A"]
    with pytest.raises(InputError):
        rank_variants(r, "dice", "point")


def test_rank_na_last_and_ties_by_name():
    r = report_of({"C": [None], "B": [3.0, None], "A": [3.0], "D": [2.0]})
    assert rank_variants(r, "d_ant", "point", "slice") == ["D", "A", "B", "C"]


def test_ranking_divergence():
    assert ranking_divergence(["A", "B"], ["A", "B"]) == (False, "A", "A")
    d = ranking_divergence(["A", "B", "C"], ["B", "A", "C"])
    assert d.diverges and (d.winner_a, d.winner_b) == ("A", "B")
    with pytest.raises(InputError):
        ranking_divergence(["A", "B"], ["A", "C"])


def test_csv_layout(tmp_path):
    recs = [rec(1.0), rec(2.0, case="c1"), rec(3.0, case="c2"), rec(None, case="c3"),
            rec(None, metric="d_inf"), rec(0.5, method="", metric="tpr_ant")]
    report = aggregate(recs)
    p = tmp_path / "r.csv"
    write_report_csv(report, p, comment="run metadata")
    text = p.read_text()
    assert text.startswith("# run metadata\n")
    body = [ln for ln in text.splitlines() if not ln.startswith("#")]
    split = body.index("")
    records = list(csv.DictReader(body[:split]))
    aggs = list(csv.DictReader(body[split + 1:]))
    assert len(records) == 6
    na = [r for r in records if r["is_na"] == "1"]
    assert all(r["value"] == "" for r in na) and len(na) == 2
    by_metric = {(a["localisation_method"], a["metric"]): a for a in aggs}
    d_ant = by_metric[("slice", "d_ant")]
    assert (d_ant["mean"], d_ant["std"], d_ant["na_count"], d_ant["n"], d_ant["summary"]) == ("2.0", "1.0", "1", "4", "2.00±1.00")
    d_inf = by_metric[("slice", "d_inf")]
    assert (d_inf["mean"], d_inf["std"], d_inf["na_count"], d_inf["n"]) == ("", "", "1", "1")
    tpr = by_metric[("", "tpr_ant")]
    assert (tpr["mean"], tpr["std"]) == ("0.5", "0.0")
    back = read_report_csv(p)
    assert back.aggregates == report.aggregates
    assert back.records == report.records


def test_csv_is_deterministic(tmp_path):
    recs = [rec(random.Random(i).random(), case=f"c{i}") for i in range(5)]
    write_report_csv(aggregate(recs), tmp_path / "a.csv")
    write_report_csv(aggregate(list(recs)), tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_reader_rejects_garbage(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("a,b\n1,2\n")
    with pytest.raises(InputError):
        read_report_csv(p)
