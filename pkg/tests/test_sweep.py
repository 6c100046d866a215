from __future__ import annotations

import json

import pytest

from bianchi.indexcalc import Caps
from bianchi.sweep import SUITES, expand, run_suite, squarefree_range, to_csv


def test_squarefree_range():
    assert squarefree_range(-10, 3) == [3, 2, -1, -2, -3, -5, -6, -7, -10]


def test_unknown_suite():
    with pytest.raises(ValueError):
        expand("nope")


SMALL_ARGS = {
    "index": dict(ds=(-1, -7), bound=8),
    "surjectivity": dict(ds=(-1, -7), bound=8),
    "filtration": dict(ds=(-1, -7), bound=8),
    "multiplicativity": dict(ds=(-1, -7), bound=8),
    "classnum": dict(ds=(-1, -2, -3)),
    "appendix-a": dict(ds=(-5,)),
}


@pytest.mark.parametrize("suite", SUITES)
def test_small_suites_pass(suite):
    rep = run_suite(suite, **SMALL_ARGS.get(suite, dict(ds=(-1,))))
    assert rep["ok"] and rep["summary"]["fail"] == 0
    assert rep["records"]


def test_skip_records_are_explicit():
    rep = run_suite("wohlfahrt", ds=(-1,))
    skipped = [r for r in rep["records"] if r["verdict"] == "skip"]
    assert [r["item"] for r in skipped] == ["m=3 n=3"]
    assert "cap" in skipped[0]["detail"]["reason"]
    rep = run_suite("wohlfahrt", ds=(-1,), caps=Caps(group=600_000))
    assert rep["summary"] == {"pass": 4, "fail": 0, "skip": 0}


def test_parallel_matches_serial():
    a = run_suite("index", ds=(-1, -3), bound=12, parallelism=1)
    b = run_suite("index", ds=(-1, -3), bound=12, parallelism=3)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_csv_rows():
    rep = run_suite("lemma61", ds=(-1, -3))
    assert to_csv(rep).splitlines() == ["suite,d,item,verdict", "lemma61,-1,ramified,pass", "lemma61,-3,inert,pass"]
