"""CSV persistence for sweep tables, opinion histories, edge snapshots and
cut-set reports.

Every file starts with a `# format_version=N` line, then a header row. Output
is deterministic: fixed row order, floats at 6 significant digits. The
readers here parse exactly what the writers emit (round-trip tested).
"""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .cutset import CutsetTimeline
from .engine import RunHistory
from .experiments import SweepRow

FORMAT_VERSION = 1

SWEEP_HEADER = [
    "sigma_deg", "theta_R_deg", "theta_F_deg", "rigid_fraction",
    "runs", "consensus_rate", "mean_components", "mean_t_conv",
]


def fmt(x: float) -> str:
    """6 significant digits, no exponent surprises for typical magnitudes."""
    return format(float(x), ".6g")


def _open_writer(path: Path):
    handle = path.open("w", newline="")
    handle.write(f"# format_version={FORMAT_VERSION}\n")
    return handle, csv.writer(handle)


def _read_rows(path: Path) -> list[list[str]]:
    with Path(path).open(newline="") as handle:
        first = handle.readline()
        if not first.startswith("# format_version="):
            raise ValueError(f"{path}: missing format_version header")
        version = int(first.strip().split("=", 1)[1])
        if version != FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported format_version {version}")
        return [row for row in csv.reader(handle) if row]


def write_sweep_csv(rows: list[SweepRow], path: str | Path) -> Path:
    path = Path(path)
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(SWEEP_HEADER)
        for row in rows:
            writer.writerow([
                fmt(row.sigma_deg), fmt(row.theta_r_deg), fmt(row.theta_f_deg),
                fmt(row.rigid_fraction), row.runs, fmt(row.consensus_rate),
                fmt(row.mean_components), fmt(row.mean_t_conv),
            ])
    return path


def read_sweep_csv(path: str | Path) -> list[SweepRow]:
    rows = _read_rows(Path(path))
    if rows[0] != SWEEP_HEADER:
        raise ValueError(f"{path}: unexpected sweep header {rows[0]}")
    return [
        SweepRow(
            sigma_deg=float(r[0]), theta_r_deg=float(r[1]), theta_f_deg=float(r[2]),
            rigid_fraction=float(r[3]), runs=int(r[4]), consensus_rate=float(r[5]),
            mean_components=float(r[6]), mean_t_conv=float(r[7]),
        )
        for r in rows[1:]
    ]


def write_opinions_csv(history: RunHistory, path: str | Path) -> Path:
    """Opinion trajectories: one row per (t, agent), angle in degrees."""
    path = Path(path)
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(["t", "agent", "theta_deg"])
        for t, theta in history.opinions:
            for agent, angle in enumerate(theta):
                writer.writerow([t, agent, fmt(math.degrees(angle))])
    return path


def read_opinions_csv(path: str | Path) -> list[tuple[int, np.ndarray]]:
    rows = _read_rows(Path(path))
    if rows[0] != ["t", "agent", "theta_deg"]:
        raise ValueError(f"{path}: unexpected opinions header {rows[0]}")
    by_t: dict[int, dict[int, float]] = {}
    for r in rows[1:]:
        by_t.setdefault(int(r[0]), {})[int(r[1])] = math.radians(float(r[2]))
    out = []
    for t in sorted(by_t):
        agents = by_t[t]
        theta = np.array([agents[a] for a in sorted(agents)])
        out.append((t, theta))
    return out


def write_edges_csv(history: RunHistory, path: str | Path) -> Path:
    """Weighted edge-list snapshots.

    Per snapshot t: first the self-weight rows (from == to == vertex), then
    the edges sorted by (from, to).
    """
    path = Path(path)
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(["t", "from", "to", "weight"])
        for t, weights, self_weights in history.weighted:
            for v, w in enumerate(self_weights):
                writer.writerow([t, v, v, fmt(w)])
            js, is_ = np.nonzero(weights)
            for j, i in zip(js.tolist(), is_.tolist()):
                writer.writerow([t, j, i, fmt(weights[j, i])])
    return path


def read_edges_csv(path: str | Path) -> list[tuple[int, np.ndarray, np.ndarray]]:
    """Reconstruct (t, weights, self_weights) snapshots from an edge-list CSV."""
    rows = _read_rows(Path(path))
    if rows[0] != ["t", "from", "to", "weight"]:
        raise ValueError(f"{path}: unexpected edges header {rows[0]}")
    records = [(int(r[0]), int(r[1]), int(r[2]), float(r[3])) for r in rows[1:]]
    if not records:
        return []
    n = max(max(j, i) for _, j, i, _ in records) + 1
    snapshots: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for t, j, i, w in records:
        if t not in snapshots:
            snapshots[t] = (np.zeros((n, n)), np.full(n, 0.5))
        weights, self_weights = snapshots[t]
        if j == i:
            self_weights[j] = w
        else:
            weights[j, i] = w
    return [(t, *snapshots[t]) for t in sorted(snapshots)]


def write_cutset_csv(timeline: CutsetTimeline, path: str | Path) -> Path:
    """Cut edges per snapshot, then a summary section with per-t sizes and
    the consecutive-nesting flag."""
    path = Path(path)
    handle, writer = _open_writer(path)
    with handle:
        writer.writerow(["t", "from", "to"])
        for report in timeline.reports:
            for u, v in sorted(report.cut_edges):
                writer.writerow([report.t, u, v])
        handle.write("# summary\n")
        writer.writerow(["t", "cut_size", "is_subset_of_previous"])
        previous = None
        for report in timeline.reports:
            nested = previous is None or report.cut_edges <= previous
            writer.writerow([report.t, len(report.cut_edges), str(nested).lower()])
            previous = report.cut_edges
    return path


def read_cutset_csv(path: str | Path) -> tuple[dict[int, set], list[tuple[int, int, bool]]]:
    """Returns ({t: cut edges}, [(t, size, nested_flag)])."""
    with Path(path).open(newline="") as handle:
        first = handle.readline()
        if not first.startswith("# format_version="):
            raise ValueError(f"{path}: missing format_version header")
        edge_rows: list[list[str]] = []
        summary_rows: list[list[str]] = []
        target = edge_rows
        for line in handle:
            if line.strip() == "# summary":
                target = summary_rows
                continue
            row = next(csv.reader([line]))
            if row:
                target.append(row)
    if edge_rows[0] != ["t", "from", "to"]:
        raise ValueError(f"{path}: unexpected cutset header {edge_rows[0]}")
    if summary_rows[0] != ["t", "cut_size", "is_subset_of_previous"]:
        raise ValueError(f"{path}: unexpected summary header {summary_rows[0]}")
    cuts: dict[int, set] = {}
    for r in edge_rows[1:]:
        cuts.setdefault(int(r[0]), set()).add((int(r[1]), int(r[2])))
    summary = [(int(r[0]), int(r[1]), r[2] == "true") for r in summary_rows[1:]]
    for t, _, _ in summary:
        cuts.setdefault(t, set())
    return cuts, summary


def emit_results(
    table: list[SweepRow] | None,
    reports: dict[str, CutsetTimeline] | None,
    snapshots: dict[str, RunHistory] | None,
    out_dir: str | Path,
) -> list[Path]:
    """Write whichever result pieces are present into out_dir.

    table -> sweep.csv; snapshots -> opinions_<run>.csv and edges_<run>.csv
    per run; reports -> cutset_<run>.csv per run. Returns the written paths.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        written: list[Path] = []
        if table is not None:
            written.append(write_sweep_csv(table, out_dir / "sweep.csv"))
        if snapshots:
            for run_id in sorted(snapshots):
                history = snapshots[run_id]
                if history.opinions:
                    written.append(
                        write_opinions_csv(history, out_dir / f"opinions_{run_id}.csv")
                    )
                if history.weighted:
                    written.append(write_edges_csv(history, out_dir / f"edges_{run_id}.csv"))
        if reports:
            for run_id in sorted(reports):
                written.append(
                    write_cutset_csv(reports[run_id], out_dir / f"cutset_{run_id}.csv")
                )
        return written
    except OSError as exc:
        raise OSError(f"cannot write results under {out_dir}: {exc}") from exc
