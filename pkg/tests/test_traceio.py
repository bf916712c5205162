"""Round-trip tests for the versioned trace and report formats."""

import numpy as np
import pytest

from proxcert import (
    CertificateReport,
    ConfigurationError,
    SolverConfig,
    random_quadratic,
    run,
)
from proxcert.traceio import (
    SCHEMA_VERSION,
    TraceMeta,
    read_report,
    read_trace,
    write_report,
    write_trace,
)


def sample_records():
    p = random_quadratic(3, 4, 100)
    cfg = SolverConfig(variant="mapm", alpha=3.0, max_iters=30)
    return p, run(p, cfg, np.zeros(4))


def sample_meta(problem, iterates=True):
    return TraceMeta(variant="mapm", alpha=3.0,
                     step=0.5 / problem.smooth.lipschitz,
                     problem_hash=problem.content_hash, dim=problem.dim,
                     max_iters=30, grad_map_tol=0.0, seed=3, iterates=iterates,
                     problem={"name": "quadratic", "dim": 4, "cond": 100,
                              "seed": 3})


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_trace_round_trip_is_exact(tmp_path, fmt):
    problem, records = sample_records()
    meta = sample_meta(problem)
    path = tmp_path / f"trace.{fmt}"
    write_trace(path, meta, records, fmt)
    meta2, records2 = read_trace(path)

    assert meta2 == meta
    assert len(records2) == len(records)
    for a, b in zip(records, records2):
        assert a.k == b.k
        assert a.f_y == b.f_y  # bit-exact via shortest round-trip decimals
        assert a.gap == b.gap
        assert a.grad_map_norm == b.grad_map_norm
        assert a.accepted == b.accepted
        assert a.f_z == b.f_z
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.y, b.y)
        assert np.array_equal(a.grad_map, b.grad_map)


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_trace_without_iterates(tmp_path, fmt):
    problem, records = sample_records()
    meta = sample_meta(problem, iterates=False)
    path = tmp_path / f"bare.{fmt}"
    write_trace(path, meta, records, fmt)
    meta2, records2 = read_trace(path)
    assert not meta2.iterates
    assert all(r.x is None and r.grad_map is None for r in records2)
    assert records2[5].f_y == records[5].f_y


def test_rejects_wrong_version(tmp_path):
    path = tmp_path / "old.csv"
    path.write_text("# proxcert-trace v0\nk,f_y\n0,1.0\n")
    with pytest.raises(ConfigurationError):
        read_trace(path)


def test_rejects_foreign_jsonl(tmp_path):
    path = tmp_path / "foreign.jsonl"
    path.write_text('{"format": "something-else", "schema_version": 1}\n')
    with pytest.raises(ConfigurationError):
        read_trace(path)


def test_rejects_unknown_format_name(tmp_path):
    problem, records = sample_records()
    with pytest.raises(ConfigurationError):
        write_trace(tmp_path / "x.bin", sample_meta(problem), records, "parquet")


@pytest.mark.parametrize("fmt", ["csv", "jsonl"])
def test_report_round_trip(tmp_path, fmt):
    reports = [
        CertificateReport(k=0, name="descent_lemma", lhs=-0.25, rhs=-0.125,
                          slack=0.125, passed=True),
        CertificateReport(k=3, name="prop1", lhs=-1.5, rhs=-1.25, slack=0.25,
                          passed=True),
        CertificateReport(k=0, name="prop2", lhs=float("nan"), rhs=float("nan"),
                          slack=float("nan"), passed=True,
                          status="not_applicable"),
        CertificateReport(k=9, name="theorem2_envelope", lhs=2.0, rhs=1.0,
                          slack=-1.0, passed=False),
    ]
    path = tmp_path / f"report.{fmt}"
    write_report(path, reports, fmt)
    back = read_report(path)
    assert len(back) == len(reports)
    for a, b in zip(reports, back):
        assert (a.k, a.name, a.passed, a.status) == (b.k, b.name, b.passed, b.status)
        if a.status == "ok":
            assert (a.lhs, a.rhs, a.slack) == (b.lhs, b.rhs, b.slack)


def test_schema_version_constant():
    assert SCHEMA_VERSION == 1
