import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polepi.analysis import (
    AggRow,
    aggregate,
    analyze_table,
    final_rows,
    load_runs_csv,
    log_pairs,
    parse_runs_text,
    pearson,
    report_to_csv,
    residualise,
    spearman,
    summary_text,
)
from polepi.errors import SchemaError, UndefinedMetricError


def _row(gamma, psi, rho_a, rho_i, seed=0, step=100, beta=0.05, mu=0.01, eps=0.25, interval=1):
    return {
        "gamma": gamma,
        "beta": beta,
        "mu": mu,
        "epsilon": eps,
        "epi_interval": interval,
        "seed": seed,
        "step": step,
        "psi": psi,
        "rho_a": rho_a,
        "rho_i": rho_i,
    }


def test_pearson_examples():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson(xs, [2 * x + 1 for x in xs]) == pytest.approx(1.0, abs=1e-12)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0, abs=1e-12)
    # hand computation of the product-moment formula
    assert pearson([1, 2, 3], [1, 3, 2]) == pytest.approx(0.5, abs=1e-12)


def test_pearson_errors():
    with pytest.raises(UndefinedMetricError):
        pearson([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(UndefinedMetricError):
        pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        pearson([1.0, 2.0, 3.0], [1.0, 2.0])


@settings(max_examples=60, deadline=None)
@given(
    xs=st.lists(st.floats(-100, 100), min_size=4, max_size=20),
    alpha=st.floats(0.01, 50),
    beta=st.floats(-100, 100),
)
def test_pearson_affine_invariance(xs, alpha, beta):
    ys = [((-1) ** i) * x + i for i, x in enumerate(xs)]
    try:
        base = pearson(xs, ys)
        scaled = pearson([alpha * x + beta for x in xs], ys)
        flipped = pearson([-alpha * x + beta for x in xs], ys)
    except UndefinedMetricError:
        return  # degenerate spread (possibly after fp scaling); nothing to compare
    assert scaled == pytest.approx(base, abs=1e-9)
    assert flipped == pytest.approx(-base, abs=1e-9)


def test_spearman_monotone():
    xs = [1.0, 2.0, 3.0, 4.0, 5.0]
    assert spearman(xs, [10, 20, 25, 30, 100]) == pytest.approx(1.0, abs=1e-12)
    assert spearman(xs, [5, 4, 3, 2, 1]) == pytest.approx(-1.0, abs=1e-12)
    # ties get average ranks
    assert spearman([1, 2, 2, 3], [1, 2, 2, 3]) == pytest.approx(1.0, abs=1e-12)


def test_log_pairs():
    lx, ly, dropped = log_pairs([1.0, math.e, math.e], [math.e**2, 1.0, math.e])
    assert dropped == 0
    assert lx == pytest.approx([0.0, 1.0, 1.0], abs=1e-15)
    assert ly == pytest.approx([2.0, 0.0, 1.0], abs=1e-15)
    lx, ly, dropped = log_pairs([1.0, 0.0, 2.0, 3.0], [1.0, 1.0, 2.0, 3.0])
    assert dropped == 1 and len(lx) == 3
    with pytest.raises(UndefinedMetricError):
        log_pairs([0.0, -1.0, 1.0, 2.0], [1.0, 1.0, 1.0, 2.0])


def test_residualise_hand_example():
    res = residualise([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    assert res == pytest.approx([-1 / 3, 2 / 3, -1 / 3], abs=1e-12)


def test_residualise_exact_linear():
    xs = [1.0, 2.0, 5.0, 7.0]
    res = residualise(xs, [3 * x - 2 for x in xs])
    assert all(abs(r) < 1e-12 for r in res)


@settings(max_examples=60, deadline=None)
@given(
    xs=st.lists(st.floats(-50, 50), min_size=3, max_size=25),
    noise=st.randoms(use_true_random=False),
)
def test_residualise_properties(xs, noise):
    ys = [x * 0.5 + noise.uniform(-1, 1) for x in xs]
    try:
        res = residualise(xs, ys)
    except UndefinedMetricError:
        return
    scale = max(1.0, max(abs(y) for y in ys))
    assert abs(sum(res)) < 1e-10 * scale * len(ys)
    # orthogonality to the predictor, normalised by the data scales so that
    # fp-noise residuals from an exactly linear fit cannot fail the check
    mx = sum(xs) / len(xs)
    cov = sum(r * (x - mx) for r, x in zip(res, xs))
    x_spread = math.sqrt(sum((x - mx) ** 2 for x in xs))
    assert abs(cov) <= 1e-9 * max(1.0, x_spread * scale)


def test_residualise_zero_variance():
    with pytest.raises(UndefinedMetricError):
        residualise([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


def test_aggregate_examples():
    rows = [
        _row(0.1, psi=0.1, rho_a=0.5, rho_i=0.2, seed=1),
        _row(0.1, psi=0.3, rho_a=0.7, rho_i=0.4, seed=2),
        _row(0.2, psi=0.5, rho_a=0.6, rho_i=0.1, seed=3),
    ]
    aggs = aggregate(rows, keys=("gamma",))
    assert len(aggs) == 2
    first = aggs[0]
    assert first.key == (0.1,)
    assert first.psi_mean == pytest.approx(0.2, abs=1e-12)
    assert first.psi_std == pytest.approx(math.sqrt(0.02), abs=1e-12)
    assert first.n == 2
    single = aggs[1]
    assert single.psi_mean == 0.5
    assert math.isnan(single.psi_std)
    # order invariance (NaN-free projection; NaN std defeats == on the dataclass)
    reversed_aggs = aggregate(rows[::-1], keys=("gamma",))
    project = lambda a: (a.key, a.psi_mean, a.rho_a_mean, a.rho_i_mean, a.n)
    assert [project(a) for a in reversed_aggs] == [project(a) for a in aggs]


def test_final_rows_picks_last_step():
    rows = [
        _row(0.1, psi=0.1, rho_a=0.5, rho_i=0.2, seed=1, step=0),
        _row(0.1, psi=0.4, rho_a=0.6, rho_i=0.3, seed=1, step=200),
        _row(0.1, psi=0.2, rho_a=0.5, rho_i=0.2, seed=1, step=100),
    ]
    latest = final_rows(rows)
    assert len(latest) == 1
    assert latest[0]["step"] == 200


def test_aggregate_recomputation_consistency():
    rows = [_row(0.3, psi=v, rho_a=v / 2, rho_i=v / 4, seed=i) for i, v in enumerate([0.1, 0.2, 0.7])]
    agg = aggregate(rows)[0]
    mean = sum(r["psi"] for r in rows) / 3
    assert abs(agg.psi_mean - mean) < 1e-12


def test_analyze_table_perfect_log_relation():
    rows = []
    for i, gamma in enumerate([0.1, 0.2, 0.3, 0.4, 0.5]):
        psi = 0.1 + 0.15 * i
        rows.append(_row(gamma, psi=psi, rho_a=0.5, rho_i=psi**-2.0, seed=i))
    report, aggs = analyze_table("synthetic", rows)
    by_metric = {r.metric: r for r in report}
    assert by_metric["pearson_log_psi_log_rho_i"].value == pytest.approx(-1.0, abs=1e-12)
    assert by_metric["pearson_psi_rho_a"].value is None  # zero variance in rho_a
    assert len(aggs) == 5


def test_analyze_table_single_gamma_is_undefined_but_aggregates():
    rows = [_row(0.5, psi=0.1 * i, rho_a=0.5, rho_i=0.2, seed=i) for i in range(5)]
    report, aggs = analyze_table("one", rows)
    assert len(aggs) == 1 and aggs[0].n == 5
    assert all(r.value is None for r in report)


def test_report_csv_and_summary_shape():
    rows = [
        _row(g, psi=0.1 + g, rho_a=0.6 - 0.3 * g, rho_i=0.3 - 0.1 * g, seed=i)
        for i, g in enumerate([0.1, 0.3, 0.5, 0.7])
    ]
    report, _ = analyze_table("mild", rows)
    csv_text = report_to_csv(report)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "metric,scenario,value,n,dropped"
    assert len(lines) == 5
    summary = summary_text(report)
    assert "mild" in summary and "pearson_psi_rho_a" in summary


def test_csv_loading_schema_check(tmp_path):
    path = tmp_path / "runs.csv"
    path.write_text("gamma,beta,psi\n0.1,0.05,0.3\n")
    with pytest.raises(SchemaError, match="mu"):
        load_runs_csv(path)
    with pytest.raises(SchemaError, match="rho_i"):
        parse_runs_text("gamma,beta,mu,epsilon,epi_interval,seed,step,psi,rho_a\n")
    good = (
        "gamma,beta,mu,epsilon,epi_interval,seed,step,psi,rho_a,rho_i\n"
        "0.1,0.05,0.01,0.25,1,7,100,0.2,0.5,0.3\n"
    )
    rows = parse_runs_text(good)
    assert rows[0]["seed"] == 7 and rows[0]["rho_i"] == 0.3
    path2 = tmp_path / "ok.csv"
    path2.write_text(good)
    assert load_runs_csv(path2) == rows
