import csv
import io
from fractions import Fraction

from hypothesis import given
from hypothesis import strategies as st

from scone.fsm import ConstraintConfig
from scone.metrics import (
    aggregate,
    corpus_eval,
    gc_ratio,
    max_run,
    random_payloads,
    rows_to_csv,
    series_to_csv,
    strand_stats,
    window_gc_counts,
)

from oracles import naive_max_run, naive_violations


def test_gc_ratio_examples():
    assert gc_ratio("GGCCAATT") == Fraction(1, 2)
    assert gc_ratio("") is None
    assert gc_ratio("GGG") == 1


def test_max_run_examples():
    assert max_run("AAAAG") == 4
    assert max_run("") == 0
    assert max_run("ATAT") == 1


def test_periodic_strand_windows():
    s = "ATGC" * 25
    st_ = strand_stats(s)
    assert st_.window_gc_series == [Fraction(1, 2)] * 81
    assert st_.violations(ConstraintConfig()) == []


@given(st.text(alphabet="ATGC", max_size=200))
def test_stats_match_naive(s):
    assert max_run(s) == naive_max_run(s)
    counts = window_gc_counts(s, 20)
    assert counts == [sum(c in "GC" for c in s[i:i + 20]) for i in range(len(s) - 19)]
    assert bool(strand_stats(s).violations(ConstraintConfig())) == naive_violations(s)


def test_violation_messages():
    v = strand_stats("AAAA" + "GC" * 10).violations(ConstraintConfig())
    assert any("max_run 4" in m for m in v)
    assert any("GC windows" in m for m in v)


def test_payloads_are_reproducible():
    assert random_payloads(5, 200, 1) == random_payloads(5, 200, 1)
    assert random_payloads(5, 200, 1) != random_payloads(5, 200, 2)
    assert all(p.bit_length == 13 for p in random_payloads(3, 13, 0))


def test_corpus_eval_is_deterministic():
    a, rows_a = corpus_eval(30, 200, seed=5)
    b, rows_b = corpus_eval(30, 200, seed=5)
    assert a.deterministic_fields() == b.deterministic_fields()
    assert [r.strand_len for r in rows_a] == [r.strand_len for r in rows_b]


def test_workers_do_not_change_results():
    a, _ = corpus_eval(40, 200, seed=3, workers=1)
    b, _ = corpus_eval(40, 200, seed=3, workers=2)
    assert a.deterministic_fields() == b.deterministic_fields()


def test_empty_corpus():
    stats, rows = corpus_eval(0, 200)
    assert rows == [] and stats.n == 0 and stats.gc_mean is None
    assert aggregate([], 20).hp_max is None


def test_unconstrained_corpus_statistics():
    cfg = ConstraintConfig(gc_enabled=False, hp_enabled=False)
    stats, _ = corpus_eval(500, 200, config=cfg, seed=1)
    assert stats.roundtrip_success_rate == 1.0
    assert stats.bpn_core_mean == 2.0 and stats.bpn_core_std == 0.0
    # binomial GC: sqrt(0.25 / 116) ~= 0.046
    assert 0.04 <= stats.gc_std <= 0.06
    assert stats.hp_max >= 6


def test_population_std():
    # two strands with GC 0 and 1 give std exactly 0.5
    from scone.metrics import StrandRow

    rows = [
        StrandRow(i, 4, 4, Fraction(i), 4, None, None, 0, None, None, 0.0, 0.0, True)
        for i in (0, 1)
    ]
    assert aggregate(rows, 20).gc_std == 0.5


def test_csv_outputs():
    _, rows = corpus_eval(3, 64, seed=0)
    table = list(csv.DictReader(io.StringIO(rows_to_csv(rows))))
    assert len(table) == 3 and table[0]["ok"] == "1"
    series = list(csv.reader(io.StringIO(series_to_csv("ATGC" * 6))))
    assert series[0] == ["position", "base", "allowed_count", "window_gc"]
    assert series[1][3] == "" and series[20][3] == "0.500000"
