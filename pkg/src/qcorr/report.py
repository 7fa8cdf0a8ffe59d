"""Result records, CSV/JSON emission, the plain-text state format and figure data."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .discord import discord_vs_purity_sweep
from .leggett_garg import LgConfig, elgi_theta_sweep, kn_circuit, lg_bounds, violation_map
from .states import DensityMatrix, InvalidStateError

VERSION = "0.1.0"
KINDS = (
    "cabello_beta",
    "chsh",
    "kn_sweep",
    "elgi_sweep",
    "discord_point",
    "discord_sweep",
    "geometric_discord",
)
SWEEP_KINDS = {"kn_sweep", "elgi_sweep", "discord_sweep"}
DIGITS = 12


class StateFileError(ValueError):
    """Unparseable state file."""


def fmt(x) -> str:
    """Numbers to 12 significant digits, ``.`` decimal point; other values via ``str``."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == 0.0:
            return "0"  # folds -0.0
        return format(x, f".{DIGITS}g")
    return str(x)


def _round(x):
    if isinstance(x, (float, np.floating)):
        return float(fmt(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def metadata(seed: int | None) -> dict:
    """Version, seed and timestamp.

    The timestamp comes from ``SOURCE_DATE_EPOCH`` when set and is omitted
    otherwise, so repeated runs emit identical bytes.
    """
    stamp = os.environ.get("SOURCE_DATE_EPOCH")
    return {"version": VERSION, "seed": seed, "timestamp": int(stamp) if stamp else None}


@dataclass
class CorrelationReport:
    kind: str
    params: dict
    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict = field(default_factory=lambda: metadata(None))

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown report kind {self.kind!r}")
        if self.kind in SWEEP_KINDS and not self.rows:
            raise ValueError(f"{self.kind} report has no rows")
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError(f"row {r} does not match columns {self.columns}")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([fmt(x) for x in r])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "params": {k: _round(v) for k, v in self.params.items()},
            "rows": [dict(zip(self.columns, map(_round, r))) for r in self.rows],
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def render(self, fmt_name: str) -> str:
        if fmt_name == "csv":
            return self.to_csv()
        if fmt_name == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt_name!r}")


def _cell(x: str):
    try:
        return float(x)
    except ValueError:
        return x


def read_csv(path_or_text) -> tuple[list[str], list[list]]:
    """Parse an emitted CSV back into a header and rows; numeric cells become floats."""
    text = Path(path_or_text).read_text() if isinstance(path_or_text, Path) else str(path_or_text)
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], [[_cell(x) for x in r] for r in rows[1:]]


def read_state_file(path) -> DensityMatrix:
    """Load a state written as ``dim d`` followed by ``d*d`` lines of ``re im``, row-major.

    Blank lines and ``#`` comments are skipped. Raises ``StateFileError`` on
    malformed content and ``InvalidStateError`` when the matrix is not a state.
    """
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise StateFileError(f"{path}: empty state file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "dim":
        raise StateFileError(f"{path}: first line must be 'dim d', got {lines[0]!r}")
    try:
        d = int(head[1])
    except ValueError:
        raise StateFileError(f"{path}: bad dimension {head[1]!r}") from None
    if d < 1 or d > 16:
        raise InvalidStateError("dimension", d, f"{path}: dimension {d} outside 1..16")
    body = lines[1:]
    if len(body) != d * d:
        raise StateFileError(f"{path}: expected {d * d} entries, found {len(body)}")
    entries = np.empty(d * d, dtype=complex)
    for k, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise StateFileError(f"{path}: entry {k + 1} must be 're im', got {line!r}")
        try:
            entries[k] = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise StateFileError(f"{path}: entry {k + 1} is not numeric: {line!r}") from None
    return DensityMatrix(entries.reshape(d, d))


def write_state_file(path, rho) -> None:
    m = np.asarray(getattr(rho, "mat", rho), dtype=complex)
    d = m.shape[0]
    out = [f"dim {d}"]
    out += [f"{float(x.real)!r} {float(x.imag)!r}" for x in m.ravel()]
    Path(path).write_text("\n".join(out) + "\n")


def kstring_report(n_min: int = 3, n_max: int = 8, points: int = 512) -> CorrelationReport:
    vm = violation_map(range(n_min, n_max + 1), points)
    return CorrelationReport(
        "kn_sweep",
        {"n_min": n_min, "n_max": n_max, "points": points},
        ("n", "phase", "K_n", "lower", "upper", "margin"),
        list(vm.rows()),
    )


def lgi_decay_report(points: int = 41, t2: float = 1.0, phase: float = math.pi / 3,
                     t_max: float = 2.0) -> CorrelationReport:
    """K_3 at fixed ``omega dt`` while the step ``dt`` grows against the dephasing time ``t2``."""
    bound = lg_bounds(3).upper
    rows = []
    for t in np.linspace(0.0, t_max * t2, points)[1:]:
        cfg = LgConfig(3, phase / t, float(t))
        rows.append((float(t), kn_circuit(cfg, t2=t2), t2, bound))
    return CorrelationReport(
        "kn_sweep",
        {"n": 3, "phase": phase, "t2": t2, "points": points},
        ("t", "K_3", "t2", "upper"),
        rows,
    )


def discord_purity_report(points: int = 101) -> CorrelationReport:
    rows = [(r.eps, r.discord, r.geometric, r.gap) for r in discord_vs_purity_sweep(np.linspace(0, 1, points))]
    return CorrelationReport("discord_sweep", {"points": points}, ("eps", "D_W", "D_G", "gap"), rows)


def elgi_report(n: int = 3, points: int = 181) -> CorrelationReport:
    rows = [(theta, d) for _, theta, d in elgi_theta_sweep(n, points)]
    return CorrelationReport("elgi_sweep", {"n": n, "points": points}, ("theta", f"D_{n}"), rows)


FIGURES = {
    "kstring.csv": kstring_report,
    "discord_purity.csv": discord_purity_report,
    "elgi.csv": elgi_report,
    "lgi_decay.csv": lgi_decay_report,
}


def figures_all(out_dir, seed: int | None = None, workers: int = 4) -> dict[str, Path]:
    """Write the four figure data files into ``out_dir`` and return their paths.

    The sweeps are evaluated on a thread pool; each file has a single writer
    and its content does not depend on scheduling.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {name: pool.submit(build) for name, build in FIGURES.items()}
        reports = {name: f.result() for name, f in futures.items()}
    written = {}
    for name, rep in reports.items():
        rep.metadata = metadata(seed)
        path = out / name
        path.write_text(rep.to_csv())
        written[name] = path
    return written
