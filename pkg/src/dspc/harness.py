"""Run workloads against a live index and report what happened.

A report is plain text: one ``key=value`` record per op, then summary
records (``record=summary``) holding per-kind latency statistics and
update tallies, the index size change and the validation tally.
:func:`audit_report` recomputes the summaries from the op records.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DspcError, GraphError
from .index import INFINITY, QueryResult, SpcIndex
from .oracle import ValidationReport, validate_index
from .graph import DynamicGraph
from .serialize import file_size
from .updates import UpdateStats, dec_spc, delete_vertex, inc_spc, insert_vertex, warm_up
from .workload import OpKind, WorkloadOp

TALLIES = ("renew_c", "renew_d", "inserted", "removed", "visited_vertices")
STAT_FIELDS = TALLIES + ("sr_a_size", "sr_b_size", "r_a_size", "r_b_size")


class WorkloadError(DspcError):
    """An op is illegal for the current graph state."""

    def __init__(self, op_index: int, op: WorkloadOp, cause: Exception):
        self.op_index = op_index
        self.op = op
        super().__init__(f"op {op_index} ({op}): {cause}")


class ValidationFailure(DspcError):
    def __init__(self, op_index: int, report: ValidationReport, run_report: RunReport):
        self.op_index = op_index
        self.report = report
        self.run_report = run_report
        super().__init__(f"validation failed after op {op_index}: {len(report.mismatches)} mismatches")


@dataclass
class OpRecord:
    index: int
    op: WorkloadOp
    elapsed: float
    stats: UpdateStats | None = None
    result: QueryResult | None = None
    new_vertex: int | None = None

    def fields(self) -> dict[str, object]:
        out: dict[str, object] = {"record": "op", "op": self.index, "kind": self.op.kind.value}
        names = {0: (), 1: ("v",), 2: ("u", "v")}[len(self.op.args)]
        if self.op.kind is OpKind.QUERY:
            names = ("s", "t")
        out.update(zip(names, self.op.args))
        if self.new_vertex is not None:
            out["v"] = self.new_vertex
        if self.result is not None:
            out["dist"] = "INF" if self.result.dist == INFINITY else self.result.dist
            out["count"] = self.result.count
        if self.stats is not None:
            for name in STAT_FIELDS:
                out[name] = getattr(self.stats, name)
            out["fast_path"] = int(self.stats.fast_path)
        out["time_us"] = f"{self.elapsed * 1e6:.1f}"
        return out


def _fmt(rec: dict[str, object]) -> str:
    return " ".join(f"{k}={v}" for k, v in rec.items())


def _latency_summary(kind: str, times_us: list[float]) -> dict[str, object]:
    arr = np.asarray(times_us, dtype=np.float64)
    out: dict[str, object] = {"record": "summary", "kind": kind, "n": len(times_us)}
    if len(times_us):
        out.update(
            mean_us=f"{arr.mean():.1f}",
            median_us=f"{np.median(arr):.1f}",
            p25_us=f"{np.percentile(arr, 25):.1f}",
            p75_us=f"{np.percentile(arr, 75):.1f}",
        )
    return out


@dataclass
class RunReport:
    records: list[OpRecord] = field(default_factory=list)
    entries_before: int = 0
    entries_after: int = 0
    bytes_before: int = 0
    bytes_after: int = 0
    validations: int = 0
    mismatches: int = 0

    def by_kind(self) -> dict[OpKind, list[OpRecord]]:
        out: dict[OpKind, list[OpRecord]] = {k: [] for k in OpKind}
        for r in self.records:
            out[r.op.kind].append(r)
        return out

    def summary_records(self) -> list[dict[str, object]]:
        # every value rendered here is recomputed by audit_report from the op
        # lines, so round the latencies from the same printed text
        out = []
        for kind, recs in self.by_kind().items():
            if not recs:
                continue
            times = [float(r.fields()["time_us"]) for r in recs]
            rec = _latency_summary(kind.value, times)
            if kind is not OpKind.QUERY and kind is not OpKind.ADD_VERTEX:
                for name in TALLIES:
                    rec[name] = sum(getattr(r.stats, name) for r in recs)
                rec["fast_path"] = sum(int(r.stats.fast_path) for r in recs)
            out.append(rec)
        out.append({
            "record": "summary", "kind": "index",
            "entries_before": self.entries_before, "entries_after": self.entries_after,
            "entries_delta": self.entries_after - self.entries_before,
            "bytes_before": self.bytes_before, "bytes_after": self.bytes_after,
            "bytes_delta": self.bytes_after - self.bytes_before,
        })
        out.append({"record": "summary", "kind": "validation",
                    "checks": self.validations, "mismatches": self.mismatches})
        return out

    def text(self) -> str:
        lines = [_fmt(r.fields()) for r in self.records]
        lines += [_fmt(r) for r in self.summary_records()]
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> list[dict[str, str]]:
    out = []
    for line in text.splitlines():
        if line.strip():
            out.append(dict(tok.split("=", 1) for tok in line.split()))
    return out


def audit_report(text: str) -> list[str]:
    """Problems found when recomputing the summary records; empty when consistent."""
    recs = parse_report(text)
    ops = [r for r in recs if r.get("record") == "op"]
    summaries = {r["kind"]: r for r in recs if r.get("record") == "summary"}
    problems = []
    kinds = sorted({r["kind"] for r in ops})
    for kind in kinds:
        mine = [r for r in ops if r["kind"] == kind]
        want = _latency_summary(kind, [float(r["time_us"]) for r in mine])
        if kind not in (OpKind.QUERY.value, OpKind.ADD_VERTEX.value):
            for name in TALLIES + ("fast_path",):
                want[name] = sum(int(r[name]) for r in mine)
        got = summaries.get(kind)
        if got is None:
            problems.append(f"missing summary for kind {kind}")
            continue
        for key, value in want.items():
            if str(value) != got.get(key):
                problems.append(f"kind {kind}: {key} is {got.get(key)} but op records give {value}")
    for kind in summaries:
        if kind not in kinds and kind not in ("index", "validation"):
            problems.append(f"summary for kind {kind} has no op records")
    idx = summaries.get("index")
    if idx is None:
        problems.append("missing index summary")
    else:
        for what in ("entries", "bytes"):
            if int(idx[f"{what}_after"]) - int(idx[f"{what}_before"]) != int(idx[f"{what}_delta"]):
                problems.append(f"index {what}_delta does not match before/after")
    return problems


def run_workload(g: DynamicGraph, idx: SpcIndex, ops, *, validate_every: int | None = None,
                 validate_pairs: int = 200, seed: int = 0) -> RunReport:
    """Apply ``ops`` in order.

    With ``validate_every=k`` a sampled oracle check runs after every k-th op
    and :class:`ValidationFailure` (carrying the partial report) is raised on
    the first mismatch. Illegal ops raise :class:`WorkloadError`.
    """
    warm_up()
    report = RunReport(entries_before=idx.entry_count(), bytes_before=file_size(idx))
    for i, op in enumerate(ops):
        a = op.args
        t0 = time.perf_counter()
        rec = OpRecord(i, op, 0.0)
        try:
            if op.kind is OpKind.INSERT_EDGE:
                rec.stats = inc_spc(g, idx, a[0], a[1])
            elif op.kind is OpKind.DELETE_EDGE:
                rec.stats = dec_spc(g, idx, a[0], a[1])
            elif op.kind is OpKind.QUERY:
                g.require_alive(a[0])
                g.require_alive(a[1])
                rec.result = idx.query(a[0], a[1])
            elif op.kind is OpKind.ADD_VERTEX:
                rec.new_vertex = insert_vertex(g, idx)
            else:
                rec.stats = delete_vertex(g, idx, a[0])
        except GraphError as exc:
            raise WorkloadError(i, op, exc) from exc
        rec.elapsed = time.perf_counter() - t0
        report.records.append(rec)
        if validate_every and (i + 1) % validate_every == 0 and g.vertex_count:
            check = validate_index(g, idx, mode=validate_pairs, seed=seed + i)
            report.validations += 1
            report.mismatches += len(check.mismatches)
            if not check.ok:
                report.entries_after, report.bytes_after = idx.entry_count(), file_size(idx)
                raise ValidationFailure(i, check, report)
    report.entries_after, report.bytes_after = idx.entry_count(), file_size(idx)
    return report
