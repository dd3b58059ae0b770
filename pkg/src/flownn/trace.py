"""Canonical flow-telemetry data model: traces, datasets, normalization.

A flow trace holds, per routing node and per millisecond, the feature
vector (send_rate, recv_rate, bg_rate) in bits/s, plus the mean end-to-end
delay of the bits delivered that millisecond at the destination node.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from flownn.errors import (
    ConfigError,
    ConservationError,
    TraceFormatError,
    TraceValidationError,
)

# Fixed feature order of the per-node feature vector.
FEATURES = ("send_rate_bps", "recv_rate_bps", "bg_rate_bps")
N_FEATURES = len(FEATURES)

CSV_HEADER = (
    "time_ms,flow_id,node_index,node_id,"
    "send_rate_bps,recv_rate_bps,bg_rate_bps,delay_ms"
)

MIN_PATH_LEN = 2
MAX_PATH_LEN = 7


@dataclass
class FlowTrace:
    """Telemetry of one flow over a contiguous time range.

    features: float64 array (n_ms, L, N_FEATURES), rates in bits/s.
    delay_ms: float64 array (n_ms,), NaN where no bits were delivered
              at the destination during the interval.
    """

    flow_id: str
    path: tuple[str, ...]
    start_ms: int
    features: np.ndarray
    delay_ms: np.ndarray

    @property
    def length_ms(self) -> int:
        return self.features.shape[0]

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.length_ms

    @property
    def n_nodes(self) -> int:
        return len(self.path)

    def validate_structure(self) -> None:
        """Check shape and value invariants; raise TraceValidationError."""
        L = self.n_nodes
        if not (MIN_PATH_LEN <= L <= MAX_PATH_LEN):
            raise TraceValidationError(
                f"flow {self.flow_id}: path length {L} outside "
                f"[{MIN_PATH_LEN}, {MAX_PATH_LEN}]"
            )
        if self.features.shape != (self.length_ms, L, N_FEATURES):
            raise TraceValidationError(
                f"flow {self.flow_id}: feature array shape "
                f"{self.features.shape} != ({self.length_ms}, {L}, {N_FEATURES})"
            )
        if self.delay_ms.shape != (self.length_ms,):
            raise TraceValidationError(
                f"flow {self.flow_id}: delay array shape {self.delay_ms.shape}"
            )
        if np.any(self.features < 0):
            raise TraceValidationError(f"flow {self.flow_id}: negative rate")
        finite = self.delay_ms[np.isfinite(self.delay_ms)]
        if np.any(finite < 0):
            raise TraceValidationError(f"flow {self.flow_id}: negative delay")


@dataclass
class TimeSeriesTensor:
    """An L x N_FEATURES feature window over [t0, t0 + n_ms)."""

    values: np.ndarray  # (n_ms, L, N_FEATURES)
    t0: int

    def __post_init__(self):
        if self.values.ndim != 3 or self.values.shape[2] != N_FEATURES:
            raise TraceValidationError(
                f"window shape {self.values.shape} is not (n_ms, L, {N_FEATURES})"
            )
        if not np.all(np.isfinite(self.values)):
            raise TraceValidationError("window contains non-finite entries")


def window_tensor(trace: FlowTrace, t0: int, n_ms: int) -> TimeSeriesTensor:
    """Cut the [t0, t0+n_ms) window out of a trace (absolute times)."""
    lo = t0 - trace.start_ms
    hi = lo + n_ms
    if lo < 0 or hi > trace.length_ms:
        raise TraceValidationError(
            f"window [{t0}, {t0 + n_ms}) outside trace range "
            f"[{trace.start_ms}, {trace.end_ms})"
        )
    return TimeSeriesTensor(trace.features[lo:hi], t0)


# ---------------------------------------------------------------------------
# CSV ingestion / serialization


def _fmt(x: float) -> str:
    # repr round-trips float64 exactly and is locale-independent
    return repr(float(x))


def write_csv(traces: list[FlowTrace], path) -> None:
    """Write traces in the canonical CSV schema (one row per ms/flow/node)."""
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER + "\n")
        w = csv.writer(fh, lineterminator="\n")
        for tr in traces:
            L = tr.n_nodes
            for i in range(tr.length_ms):
                t = tr.start_ms + i
                for n in range(L):
                    d = ""
                    if n == L - 1 and math.isfinite(tr.delay_ms[i]):
                        d = _fmt(tr.delay_ms[i])
                    w.writerow(
                        [
                            t,
                            tr.flow_id,
                            n,
                            tr.path[n],
                            _fmt(tr.features[i, n, 0]),
                            _fmt(tr.features[i, n, 1]),
                            _fmt(tr.features[i, n, 2]),
                            d,
                        ]
                    )


def ingest_csv(path) -> list[FlowTrace]:
    """Parse a trace CSV into one FlowTrace per flow_id.

    Rows may arrive in any order; they are grouped by flow and time-sorted.
    Raises TraceFormatError (with line number) on malformed rows and
    TraceValidationError on gaps or inconsistent paths.
    """
    per_flow: dict[str, dict] = {}
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\n").rstrip("\r")
        if header != CSV_HEADER:
            raise TraceFormatError(1, f"unexpected header {header!r}")
        reader = csv.reader(fh)
        for line_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 8:
                raise TraceFormatError(line_no, f"expected 8 fields, got {len(row)}")
            try:
                t = int(row[0])
                flow_id = row[1]
                node_index = int(row[2])
                node_id = row[3]
                rates = (float(row[4]), float(row[5]), float(row[6]))
                delay = float(row[7]) if row[7] != "" else math.nan
            except ValueError as exc:
                raise TraceFormatError(line_no, str(exc)) from None
            if node_index < 0:
                raise TraceFormatError(line_no, f"negative node_index {node_index}")
            acc = per_flow.setdefault(
                flow_id, {"rows": [], "nodes": {}}
            )
            prev = acc["nodes"].setdefault(node_index, node_id)
            if prev != node_id:
                raise TraceFormatError(
                    line_no,
                    f"flow {flow_id}: node_index {node_index} maps to both "
                    f"{prev!r} and {node_id!r}",
                )
            acc["rows"].append((t, node_index, rates, delay))

    traces = []
    for flow_id, acc in per_flow.items():
        n_nodes = max(acc["nodes"]) + 1
        if sorted(acc["nodes"]) != list(range(n_nodes)):
            raise TraceValidationError(
                f"flow {flow_id}: node indices not contiguous from 0"
            )
        path = tuple(acc["nodes"][i] for i in range(n_nodes))
        times = sorted({t for t, _, _, _ in acc["rows"]})
        start = times[0]
        for a, b in zip(times, times[1:]):
            if b != a + 1:
                raise TraceValidationError(
                    f"flow {flow_id}: gap at t={a + 1}"
                )
        n_ms = len(times)
        feats = np.full((n_ms, n_nodes, N_FEATURES), np.nan)
        delay = np.full(n_ms, np.nan)
        for t, n, rates, d in acc["rows"]:
            feats[t - start, n, :] = rates
            if n == n_nodes - 1:
                delay[t - start] = d
        if np.any(np.isnan(feats)):
            miss = np.argwhere(np.isnan(feats[:, :, 0]))
            t_bad, n_bad = miss[0]
            raise TraceValidationError(
                f"flow {flow_id}: missing record at t={start + t_bad} "
                f"node_index={n_bad}"
            )
        tr = FlowTrace(flow_id, path, start, feats, delay)
        tr.validate_structure()
        traces.append(tr)
    traces.sort(key=lambda tr: tr.flow_id)
    return traces


# ---------------------------------------------------------------------------
# Conservation validation


@dataclass
class ConservationReport:
    """Per adjacent node pair: relative cumulative send/recv imbalance."""

    flow_id: str
    imbalances: list[float]
    tolerance: float

    @property
    def ok(self) -> bool:
        return all(v <= self.tolerance for v in self.imbalances)

    @property
    def worst(self) -> float:
        return max(self.imbalances) if self.imbalances else 0.0


def validate_trace(
    trace: FlowTrace, tolerance: float, raise_on_fail: bool = True
) -> ConservationReport:
    """Check cumulative-rate conservation between neighboring nodes.

    For every adjacent pair the cumulative bits the upstream node sent must
    equal the cumulative bits the downstream node received, to a relative
    tolerance. 0/0 counts as balanced.
    """
    imbalances = []
    for n in range(trace.n_nodes - 1):
        sent = float(np.sum(trace.features[:, n, 0]))
        recv = float(np.sum(trace.features[:, n + 1, 1]))
        if sent == 0.0 and recv == 0.0:
            imbalances.append(0.0)
            continue
        denom = sent if sent > 0 else recv
        imbalances.append(abs(sent - recv) / denom)
    report = ConservationReport(trace.flow_id, imbalances, tolerance)
    if raise_on_fail and not report.ok:
        pair = int(np.argmax(imbalances))
        raise ConservationError(
            f"flow {trace.flow_id}: nodes ({pair}, {pair + 1}) imbalance "
            f"{report.imbalances[pair]:.3e} above tolerance {tolerance:.1e}"
        )
    return report


# ---------------------------------------------------------------------------
# Normalization


@dataclass
class NormStats:
    """Per-feature global z-score statistics from the training range.

    Zero-variance features are centered but not scaled (std stored as 1.0)
    and flagged in ``degenerate``.
    """

    mean: np.ndarray  # (N_FEATURES,)
    std: np.ndarray  # (N_FEATURES,)
    degenerate: list[str]
    delay_mean: float = 0.0
    delay_std: float = 1.0

    def to_dict(self) -> dict:
        return {
            "feature_mean": [float(v) for v in self.mean],
            "feature_std": [float(v) for v in self.std],
            "degenerate": list(self.degenerate),
            "delay_mean": self.delay_mean,
            "delay_std": self.delay_std,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(
            np.asarray(d["feature_mean"], dtype=float),
            np.asarray(d["feature_std"], dtype=float),
            list(d["degenerate"]),
            float(d["delay_mean"]),
            float(d["delay_std"]),
        )


def compute_norm_stats(
    traces: list[FlowTrace], flow_ids: list[str], t_lo: int, t_hi: int
) -> NormStats:
    """Fit z-score stats on [t_lo, t_hi) of the given (seen) flows only."""
    by_id = {tr.flow_id: tr for tr in traces}
    cols = [[] for _ in range(N_FEATURES)]
    delays = []
    for fid in flow_ids:
        tr = by_id[fid]
        lo, hi = t_lo - tr.start_ms, t_hi - tr.start_ms
        block = tr.features[lo:hi]
        for f in range(N_FEATURES):
            cols[f].append(block[:, :, f].ravel())
        d = tr.delay_ms[lo:hi]
        delays.append(d[np.isfinite(d)])
    mean = np.empty(N_FEATURES)
    std = np.empty(N_FEATURES)
    degenerate = []
    for f in range(N_FEATURES):
        v = np.concatenate(cols[f])
        mean[f] = v.mean()
        s = v.std()
        if s < 1e-12:
            degenerate.append(FEATURES[f])
            s = 1.0
        std[f] = s
    dvals = np.concatenate(delays) if delays else np.empty(0)
    if dvals.size:
        dmean = float(dvals.mean())
        dstd = float(dvals.std())
        if dstd < 1e-12:
            degenerate.append("delay_ms")
            dstd = 1.0
    else:
        dmean, dstd = 0.0, 1.0
        degenerate.append("delay_ms")
    return NormStats(mean, std, degenerate, dmean, dstd)


def normalize(values: np.ndarray, stats: NormStats) -> np.ndarray:
    """z-score the trailing feature axis of (..., N_FEATURES) values."""
    return (values - stats.mean) / stats.std


def denormalize(values: np.ndarray, stats: NormStats) -> np.ndarray:
    """Inverse of normalize (exact up to float rounding)."""
    return values * stats.std + stats.mean


def normalize_delay(delay: np.ndarray, stats: NormStats) -> np.ndarray:
    return (delay - stats.delay_mean) / stats.delay_std


# ---------------------------------------------------------------------------
# Dataset assembly


@dataclass
class DatasetSplit:
    """Train/val/test ranges over time plus seen/unseen flow partition."""

    train_range: tuple[int, int]
    val_range: tuple[int, int]
    test_range: tuple[int, int]
    seen_flow_ids: list[str]
    unseen_flow_ids: list[str]
    stats: NormStats
    seed: int
    trace_path: str = ""

    def to_manifest(self) -> dict:
        return {
            "format": "flownn-dataset-v1",
            "train_range": list(self.train_range),
            "val_range": list(self.val_range),
            "test_range": list(self.test_range),
            "seen_flow_ids": self.seen_flow_ids,
            "unseen_flow_ids": self.unseen_flow_ids,
            "normalization": self.stats.to_dict(),
            "normalization_scheme": "global-zscore-train-seen",
            "seed": self.seed,
            "trace_path": self.trace_path,
        }

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_manifest(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "DatasetSplit":
        with open(path) as fh:
            m = json.load(fh)
        if m.get("format") != "flownn-dataset-v1":
            raise ConfigError(f"{path}: not a dataset manifest")
        return cls(
            tuple(m["train_range"]),
            tuple(m["val_range"]),
            tuple(m["test_range"]),
            list(m["seen_flow_ids"]),
            list(m["unseen_flow_ids"]),
            NormStats.from_dict(m["normalization"]),
            int(m["seed"]),
            m.get("trace_path", ""),
        )


def build_dataset(
    traces: list[FlowTrace],
    ratio: tuple[int, int, int] = (6, 2, 2),
    n_unseen: int = 10,
    seed: int = 0,
) -> DatasetSplit:
    """Split time by ratio and hold out the last n_unseen flows (seeded order).

    Normalization statistics come from the train range of the seen flows
    only, so no future or held-out information leaks into them.
    """
    if not traces:
        raise ConfigError("no traces given")
    if n_unseen < 0 or n_unseen >= len(traces):
        raise ConfigError(
            f"n_unseen={n_unseen} must leave at least one seen flow "
            f"out of {len(traces)}"
        )
    start = traces[0].start_ms
    end = traces[0].end_ms
    for tr in traces:
        if (tr.start_ms, tr.end_ms) != (start, end):
            raise ConfigError(
                f"flow {tr.flow_id} time range [{tr.start_ms}, {tr.end_ms}) "
                f"differs from [{start}, {end})"
            )
    total = end - start
    rsum = sum(ratio)
    if total < rsum:
        raise ConfigError(f"time range {total} ms too short for ratio {ratio}")
    t1 = start + (total * ratio[0]) // rsum
    t2 = start + (total * (ratio[0] + ratio[1])) // rsum

    ids = [tr.flow_id for tr in traces]
    order = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[i] for i in order]
    seen = sorted(shuffled[: len(ids) - n_unseen])
    unseen = sorted(shuffled[len(ids) - n_unseen :])

    stats = compute_norm_stats(traces, seen, start, t1)
    return DatasetSplit(
        (start, t1), (t1, t2), (t2, end), seen, unseen, stats, seed
    )


# ---------------------------------------------------------------------------
# Targets


def multi_step_targets(series: np.ndarray, delta: int) -> np.ndarray:
    """Mean of the next ``delta`` steps: target[t] = mean(x[t+1 .. t+delta]).

    The result is shorter than the input by ``delta``.
    """
    if delta < 1:
        raise ConfigError(f"delta must be >= 1, got {delta}")
    n = series.shape[0]
    if delta >= n:
        raise ConfigError(f"delta={delta} exceeds series length {n}")
    out = np.empty((n - delta,) + series.shape[1:])
    acc = series[1 : n - delta + 1].astype(float).copy()
    for k in range(2, delta + 1):
        acc += series[k : n - delta + k]
    out[:] = acc / delta
    return out
