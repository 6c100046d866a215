"""Batch verification suites over ranges of d.

Every suite expands into a list of independent work items.  Items run in a
process pool when parallelism > 1, and results are merged in input order, so
the report is identical for every degree of parallelism.
"""
from __future__ import annotations

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Iterable

from .certify import (
    certify_noncongruence,
    class_number,
    power_subgroup_status,
    verify_appendix_a,
    verify_lemma_6_1,
)
from .ideals import CapacityError, Ideal, format_ideal, ideals_up_to, is_prime, split_type
from .indexcalc import (
    DEFAULT_CAPS,
    Caps,
    enumerable,
    index_formula,
    verify_filtration,
    verify_multiplicativity,
    verify_surjectivity,
    verify_wohlfahrt_closure,
)
from .quadring import make_ring, square_factor

ACCEPTANCE_DS = (-1, -2, -3, -5, -7, -11)
WOHLFAHRT_DS = (-1, -2, -3)
WOHLFAHRT_PAIRS = ((2, 3), (3, 2), (2, 2), (3, 3))

CLASS_NUMBER_AT_MOST_2 = frozenset(
    {-1, -2, -3, -7, -11, -19, -43, -67, -163}
    | {-5, -6, -10, -13, -15, -22, -35, -37, -51, -58, -91, -115, -123, -187, -235, -267, -403, -427}
)


def squarefree_range(lo: int, hi: int) -> list[int]:
    """Squarefree d in [lo, hi], excluding 0 and 1, in descending order."""
    return [d for d in range(hi, lo - 1, -1) if d not in (0, 1) and square_factor(d) is None]


def _record(suite: str, d: int, item: str, ok: bool | None, detail: dict) -> dict:
    verdict = "skip" if ok is None else ("pass" if ok else "fail")
    return {"suite": suite, "d": d, "item": item, "verdict": verdict, "detail": detail}


# -- per-item workers (module level so they pickle) ---------------------------


def _index_item(d: int, hnf: tuple[int, int, int], caps: Caps) -> dict:
    R = make_ring(d)
    I = Ideal(R, *hnf)
    rep = index_formula(R, I, caps)
    return _record("index", d, format_ideal(I, hnf=True), rep.match if rep.oracle is not None else None, rep.as_dict())


def _surjectivity_item(d: int, hnf: tuple[int, int, int], caps: Caps) -> dict:
    R = make_ring(d)
    I = Ideal(R, *hnf)
    if not enumerable(I, caps):
        return _record("surjectivity", d, format_ideal(I, hnf=True), None, {"reason": "over cap"})
    rep = verify_surjectivity(R, I, caps)
    return _record("surjectivity", d, format_ideal(I, hnf=True), rep.surjective, rep.as_dict())


def _filtration_item(d: int, hnf: tuple[int, int, int], m: int, caps: Caps) -> dict:
    R = make_ring(d)
    P = Ideal(R, *hnf)
    name = f"{format_ideal(P, hnf=True)} m={m}"
    try:
        rep = verify_filtration(R, P, m, caps)
    except CapacityError as exc:
        return _record("filtration", d, name, None, {"reason": str(exc)})
    return _record("filtration", d, name, rep.ok, rep.as_dict())


def _multiplicativity_item(d: int, a: tuple[int, int, int], b: tuple[int, int, int], caps: Caps) -> dict:
    R = make_ring(d)
    A, B = Ideal(R, *a), Ideal(R, *b)
    rep = verify_multiplicativity(R, A, B, caps)
    name = f"{format_ideal(A, hnf=True)} x {format_ideal(B, hnf=True)}"
    return _record("multiplicativity", d, name, rep.ok, rep.as_dict())


def _wohlfahrt_item(d: int, m: int, n: int, caps: Caps) -> dict:
    R = make_ring(d)
    name = f"m={m} n={n}"
    try:
        rep = verify_wohlfahrt_closure(R, m, n, caps)
    except CapacityError as exc:
        return _record("wohlfahrt", d, name, None, {"reason": str(exc)})
    return _record("wohlfahrt", d, name, rep.equal, rep.as_dict())


def _lemma61_item(d: int, caps: Caps) -> dict:
    rep = verify_lemma_6_1(d)
    return _record("lemma61", d, rep.kind, rep.ok, rep.as_dict())


def _classnum_item(d: int, caps: Caps) -> dict:
    h = class_number(d)
    return _record("classnum", d, "h", True, {"class_number": h})


def _certify_item(d: int, q: int, caps: Caps) -> dict:
    c = certify_noncongruence(d, q)
    return _record("certify", d, f"q={q}", True, c.as_dict())


def _power_item(d: int, caps: Caps) -> dict:
    r = power_subgroup_status(d)
    return _record("power-status", d, "B_d^2", True, r.as_dict())


def _appendix_item(d: int, q: int, caps: Caps) -> dict:
    rep = verify_appendix_a(d, q, caps)
    return _record("appendix-a", d, f"q={q}", rep.ok, rep.as_dict())


# -- suite expansion -----------------------------------------------------------


Item = tuple[Callable[..., dict], tuple]


def _ideal_items(fn, ds: Iterable[int], bound: int, caps: Caps) -> list[Item]:
    return [(fn, (d, I.hnf, caps)) for d in ds for I in ideals_up_to(make_ring(d), bound)]


def _filtration_items(ds, bound, caps) -> list[Item]:
    items = []
    for d in ds:
        R = make_ring(d)
        primes = sorted(
            {P for p in range(2, bound + 1) if is_prime(p) for P in split_type(R, p).primes if P.norm <= bound},
            key=lambda P: P.sort_key(),
        )
        items += [(_filtration_item, (d, P.hnf, m, caps)) for P in primes for m in (1, 2)]
    return items


def _multiplicativity_items(ds, bound, caps) -> list[Item]:
    items = []
    for d in ds:
        ideals = ideals_up_to(make_ring(d), bound)
        for i, A in enumerate(ideals):
            for B in ideals[i + 1 :]:
                if A.norm * B.norm <= bound and (A + B).is_unit():
                    items.append((_multiplicativity_item, (d, A.hnf, B.hnf, caps)))
    return items


SUITES = ("index", "surjectivity", "filtration", "multiplicativity", "wohlfahrt", "lemma61", "classnum", "certify", "power-status", "appendix-a")

DEFAULT_DS = {
    "index": ACCEPTANCE_DS,
    "surjectivity": ACCEPTANCE_DS,
    "filtration": ACCEPTANCE_DS,
    "multiplicativity": ACCEPTANCE_DS,
    "wohlfahrt": WOHLFAHRT_DS,
    "lemma61": tuple(squarefree_range(-43, -1)),
    "classnum": tuple(squarefree_range(-430, -1)),
    "certify": (-1, -2, -3, -7, -11, -19, -23),
    "power-status": (-1, -2, -3, -7, -11, -19, -23),
    "appendix-a": (-5,),
}
DEFAULT_BOUND = {"index": 36, "surjectivity": 36, "filtration": 9, "multiplicativity": 36}


def expand(suite: str, ds: Iterable[int] | None = None, bound: int | None = None, caps: Caps = DEFAULT_CAPS) -> list[Item]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    ds = tuple(DEFAULT_DS[suite] if ds is None else ds)
    bound = DEFAULT_BOUND.get(suite, 0) if bound is None else bound
    if suite == "index":
        return _ideal_items(_index_item, ds, bound, caps)
    if suite == "surjectivity":
        return _ideal_items(_surjectivity_item, ds, bound, caps)
    if suite == "filtration":
        return _filtration_items(ds, bound, caps)
    if suite == "multiplicativity":
        return _multiplicativity_items(ds, bound, caps)
    if suite == "wohlfahrt":
        return [(_wohlfahrt_item, (d, m, n, caps)) for d in ds for m, n in WOHLFAHRT_PAIRS]
    if suite == "lemma61":
        return [(_lemma61_item, (d, caps)) for d in ds]
    if suite == "classnum":
        return [(_classnum_item, (d, caps)) for d in ds]
    if suite == "certify":
        return [(_certify_item, (d, q, caps)) for d in ds for q in (2, 3, 5, 7)]
    if suite == "power-status":
        return [(_power_item, (d, caps)) for d in ds]
    return [(_appendix_item, (d, 5, caps)) for d in ds]


def _call(item: Item) -> dict:
    fn, args = item
    return fn(*args)


def run_items(items: list[Item], parallelism: int = 1) -> list[dict]:
    if parallelism <= 1 or len(items) <= 1:
        return [_call(it) for it in items]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(_call, items, chunksize=max(1, len(items) // (4 * parallelism))))


def _classnum_summary(records: list[dict], ds: Iterable[int]) -> dict:
    found = sorted((r["d"] for r in records if r["detail"]["class_number"] <= 2), reverse=True)
    lo = min(ds)
    expected = sorted((d for d in CLASS_NUMBER_AT_MOST_2 if d >= lo), reverse=True)
    return _record("classnum", lo, "h<=2 set", found == expected, {"found": found, "expected": expected})


def run_suite(
    suite: str,
    ds: Iterable[int] | None = None,
    bound: int | None = None,
    caps: Caps = DEFAULT_CAPS,
    parallelism: int = 1,
) -> dict[str, Any]:
    suites = SUITES if suite == "all" else (suite,)
    records: list[dict] = []
    for name in suites:
        use_ds = tuple(DEFAULT_DS[name] if ds is None else ds)
        recs = run_items(expand(name, use_ds, bound, caps), parallelism)
        if name == "classnum":
            recs.append(_classnum_summary(recs, use_ds))
        records += recs
    counts = {k: sum(r["verdict"] == k for r in records) for k in ("pass", "fail", "skip")}
    return {"suite": suite, "records": records, "summary": counts, "ok": counts["fail"] == 0}


def to_csv(report: dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["suite", "d", "item", "verdict"])
    for r in report["records"]:
        writer.writerow([r["suite"], r["d"], r["item"], r["verdict"]])
    return buf.getvalue()
