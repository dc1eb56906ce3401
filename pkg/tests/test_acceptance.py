"""Exit criteria for the toolkit, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
Run alone with ``pytest tests/test_acceptance.py``.
"""

import hashlib
import io
import time
from datetime import date
from fractions import Fraction

import numpy as np
import pytest

from basketsom.analysis import build_report, compute_umatrix, confidence, support
from basketsom.cli import main
from basketsom.ingest import (
    Basket,
    build_catalog,
    group_baskets,
    parse_transactions,
    write_basket_matrix,
)
from basketsom.report import read_pgm
from basketsom.som import SomConfig, SomGrid, find_bmu, read_map, train, train_step, write_map
from basketsom.synth import default_spec, generate, oracle_pair_counts, synthetic_catalog

from conftest import ACCEPTANCE_LOG

SEEDS = (0, 1, 2, 3, 4)


def record(name, ok, detail):
    ACCEPTANCE_LOG.append((name, bool(ok), detail))
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, detail


def test_c1_umatrix_worked_example():
    centre = np.array([2.0, 1.0, 1.5, 0.7])
    w = np.tile(centre, (3, 3, 1))
    for (r, c), d in zip([(0, 1), (2, 1), (1, 0), (1, 2)], [7.0, 12.5, 11.5, 5.0]):
        w[r, c] = centre + np.array([d, 0.0, 0.0, 0.0])
    grid = SomGrid(w)
    timings = []
    for _ in range(5):
        t0 = time.perf_counter()
        value = compute_umatrix(grid).values[1, 1]
        timings.append(time.perf_counter() - t0)
    err = abs(value - 9.0)
    best = min(timings)
    record(
        "C1 U-matrix worked example",
        err <= 1e-12 and best < 1e-3,
        f"value={value!r} |err|={err:.1e} (tol 1e-12), runtime={best * 1e3:.3f} ms (< 1 ms)",
    )


def _map_digest(baskets, config):
    grid, _ = train(baskets, config)
    buf = io.StringIO()
    write_map(grid, buf, config)
    return hashlib.sha256(buf.getvalue().encode()).hexdigest()


def test_c2_determinism():
    baskets = generate(default_spec(seed=0))
    t0 = time.perf_counter()
    same = []
    for seed in (11, 22, 33):
        config = SomConfig(seed=seed)
        same.append(_map_digest(baskets, config) == _map_digest(baskets, config))
    elapsed = time.perf_counter() - t0
    record(
        "C2 determinism",
        all(same) and elapsed < 120,
        f"hash-equal per seed {same}, 6 default runs on 5000x30 in {elapsed:.1f} s (< 120 s)",
    )


def test_c3_update_identities():
    rng = np.random.default_rng(20240)
    cases = 1000
    failures = 0
    for _ in range(cases):
        rows, cols, dim = (int(v) for v in rng.integers(1, 7, size=3))
        if rows * cols < 2:
            cols = 2
        w = rng.normal(size=(rows, cols, dim)) * rng.choice([1e-3, 1.0, 1e3])
        x = rng.normal(size=dim) * rng.choice([1e-3, 1.0, 1e3])
        radius = float(rng.uniform(0.05, 10))
        grid = SomGrid(w)
        untouched = train_step(grid, x, 0.0, radius)
        bmu, _ = find_bmu(grid, x)
        full = train_step(grid, x, 1.0, radius)
        if not (untouched.weights.tobytes() == grid.weights.tobytes()):
            failures += 1
        if not np.array_equal(full.weights[bmu], x):
            failures += 1
    record(
        "C3 update-rule identities",
        failures == 0,
        f"{cases} random cases x 2 identities, {failures} violations",
    )


def test_c4_statistics_oracle_equivalence():
    rng = np.random.default_rng(4)
    cases = 10_000
    mismatches = 0
    checked = 0
    for _ in range(cases):
        n = int(rng.integers(1, 11))
        d = int(rng.integers(2, 7))
        m = rng.integers(0, 2, size=(n, d))
        empty = m.sum(axis=1) == 0
        m[empty, rng.integers(0, d, size=int(empty.sum()))] = 1
        baskets = [Basket(i + 1, f"c{i}", date(2011, 9, 1), row) for i, row in enumerate(m)]
        catalog = synthetic_catalog(d)
        counts = oracle_pair_counts(baskets)
        for a in range(d):
            name_a = catalog.products[a]
            checked += 1
            if Fraction(support(baskets, catalog, name_a)) != Fraction(float(Fraction(counts[(a, a)], n))):
                mismatches += 1
            if counts[(a, a)] == 0:
                continue
            for b in range(d):
                if a == b:
                    continue
                checked += 1
                expected = Fraction(counts[(min(a, b), max(a, b))], counts[(a, a)])
                if Fraction(confidence(baskets, catalog, name_a, catalog.products[b])) != Fraction(float(expected)):
                    mismatches += 1
    record(
        "C4 statistics oracle equivalence",
        mismatches == 0,
        f"{cases} datasets up to 10x6, {checked} support/confidence values, {mismatches} mismatches",
    )


@pytest.fixture(scope="module")
def recovery_runs():
    runs = {}
    for seed in SEEDS:
        t0 = time.perf_counter()
        spec = default_spec(seed=seed)
        baskets = generate(spec)
        catalog = synthetic_catalog(spec.n_products)
        grid, report = train(baskets, SomConfig(seed=seed))
        analysis = build_report(grid, compute_umatrix(grid), baskets, catalog)
        elapsed = time.perf_counter() - t0
        anchors = [{catalog.products[j] for j in g.products} for g in spec.groups]
        recovered = [
            any(group <= set(cl.dominant_products) for cl in analysis.clusters) for group in anchors
        ]
        runs[seed] = {
            "clusters": len(analysis.clusters),
            "recovered": recovered,
            "elapsed": elapsed,
            "report": report,
        }
    return runs


def test_c5_synthetic_recovery(recovery_runs):
    ok_seeds = [
        s
        for s, r in recovery_runs.items()
        if r["clusters"] >= 3 and all(r["recovered"]) and r["elapsed"] < 60
    ]
    slowest = max(r["elapsed"] for r in recovery_runs.values())
    detail = ", ".join(
        f"seed {s}: {r['clusters']} clusters, groups recovered {sum(r['recovered'])}/3"
        for s, r in recovery_runs.items()
    )
    record(
        "C5 synthetic recovery",
        len(ok_seeds) >= 4,
        f"{len(ok_seeds)}/5 seeds pass (need 4); {detail}; slowest {slowest:.1f} s (< 60 s)",
    )


def test_c6_training_improves_fit(recovery_runs):
    pairs = {s: (r["report"].initial_qe, r["report"].final_qe) for s, r in recovery_runs.items()}
    record(
        "C6 training improves fit",
        all(final < initial for initial, final in pairs.values()),
        "; ".join(f"seed {s}: {i:.4f} -> {f:.4f}" for s, (i, f) in pairs.items()),
    )


def test_c7_ingest_fixture(fixtures):
    source = fixtures / "transactions_50.csv"
    rows = parse_transactions(source)
    catalog = build_catalog(rows)
    baskets = group_baskets(rows, catalog)

    # brute force over the raw lines, independent of the parser
    lines = source.read_text(encoding="utf-8").splitlines()[1:]
    buyers = {}
    for line in lines:
        fields = line.split(";")
        buyers.setdefault(fields[7].strip(), set()).add((fields[0], fields[1]))
    sums = np.sum([b.vector for b in baskets], axis=0)
    sums_ok = set(buyers) == set(catalog.products) and all(
        int(sums[catalog.index[p]]) == len(keys) for p, keys in buyers.items()
    )

    out = io.StringIO()
    write_basket_matrix(baskets, catalog, out)
    exact = out.getvalue() == (fixtures / "expected_baskets_50.csv").read_text(encoding="utf-8")
    record(
        "C7 ingest correctness",
        len(rows) == 50 and len(baskets) == 20 and sums_ok and exact,
        f"{len(rows)} rows -> {len(baskets)} baskets (expected 20), column sums match={sums_ok}, "
        f"matrix file bit-exact={exact}",
    )


def test_c8_image_contract(tmp_path):
    data_dir, run_dir, report_dir = tmp_path / "data", tmp_path / "run", tmp_path / "report"
    assert main(["synth", "--out", str(data_dir), "--seed", "8"]) == 0
    assert main(["train", "--baskets", str(data_dir / "baskets.csv"), "--out", str(run_dir), "--seed", "8"]) == 0
    scale = 4
    assert (
        main(
            [
                "report",
                "--map", str(run_dir / "map.txt"),
                "--baskets", str(data_dir / "baskets.csv"),
                "--out", str(report_dir),
                "--scale", str(scale),
            ]
        )
        == 0
    )
    img = read_pgm((report_dir / "umatrix.pgm").read_bytes())
    with open(run_dir / "map.txt", encoding="utf-8") as fh:
        grid, _ = read_map(fh)
    u = compute_umatrix(grid).values
    block = img.pixels[::scale, ::scale]
    lows = block[u == u.min()]
    highs = block[u == u.max()]
    shape_ok = (img.height, img.width) == (u.shape[0] * scale, u.shape[1] * scale)
    record(
        "C8 image contract",
        shape_ok and lows.size > 0 and np.all(lows == 0) and np.all(highs == 255),
        f"P5 {img.width}x{img.height}, min cells -> {sorted(set(lows.tolist()))}, "
        f"max cells -> {sorted(set(highs.tolist()))}",
    )
