"""Two-panel SVG figures: the a-plane path above, root trajectories below.

Output is deterministic: fixed hash salt, no timestamp, text kept as text.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
from matplotlib.figure import Figure  # noqa: E402

from .errors import ParameterError  # noqa: E402
from .permutations import label_key  # noqa: E402

CSV_HEADER = ["t", "a_re", "a_im", "label", "x_re", "x_im", "residual"]
CANVAS = (8.0, 10.0)  # inches at 100 dpi: 800 x 1000
DPI = 100
MARGIN = 0.05

_RC = {
    "svg.hashsalt": "tanmono",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
    "path.simplify": False,
}


class CsvFormatError(ParameterError):
    """Malformed trajectory CSV; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class TrajectoryTable:
    t: list = field(default_factory=list)
    a: list = field(default_factory=list)
    x: dict = field(default_factory=dict)  # label -> list of complex

    @property
    def labels(self) -> list:
        return sorted(self.x, key=label_key)


def read_trajectories(text: str) -> TrajectoryTable:
    """Parse the tracker CSV dump, rejecting anything malformed."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise CsvFormatError(1, "empty file (expected header " + ",".join(CSV_HEADER) + ")")
    if [c.strip() for c in rows[0]] != CSV_HEADER:
        raise CsvFormatError(1, "bad header, expected " + ",".join(CSV_HEADER))
    table = TrajectoryTable()
    last_t = None
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise CsvFormatError(lineno, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        try:
            t, a_re, a_im, x_re, x_im, res = (float(row[i]) for i in (0, 1, 2, 4, 5, 6))
        except ValueError as exc:
            raise CsvFormatError(lineno, f"not a number ({exc})") from None
        if not all(math.isfinite(v) for v in (t, a_re, a_im, x_re, x_im)):
            raise CsvFormatError(lineno, "non-finite value")
        label = row[3].strip()
        if not label:
            raise CsvFormatError(lineno, "empty label")
        if last_t is not None and t < last_t:
            raise CsvFormatError(lineno, f"t decreases ({t} < {last_t})")
        if t != last_t:
            table.t.append(t)
            table.a.append(complex(a_re, a_im))
            last_t = t
        table.x.setdefault(label, []).append(complex(x_re, x_im))
    if not table.t:
        raise CsvFormatError(len(rows) + 1, "no data rows")
    n = len(table.t)
    for label, xs in table.x.items():
        if len(xs) != n:
            raise CsvFormatError(len(rows), f"label {label} has {len(xs)} samples, expected {n}")
    return table


def _bounds(points, pad=MARGIN):
    re = [p.real for p in points]
    im = [p.imag for p in points]
    lo_x, hi_x, lo_y, hi_y = min(re), max(re), min(im), max(im)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-3)
    dx, dy = max(hi_x - lo_x, span * 0.2), max(hi_y - lo_y, span * 0.2)
    cx, cy = 0.5 * (lo_x + hi_x), 0.5 * (lo_y + hi_y)
    return (cx - dx * (0.5 + pad), cx + dx * (0.5 + pad)), (cy - dy * (0.5 + pad), cy + dy * (0.5 + pad))


def render_trajectories(table: TrajectoryTable, critical_values=(), title: str | None = None, fmt: str = "svg"):
    """Return the figure as SVG text (or bytes for a raster ``fmt``)."""
    with matplotlib.rc_context(_RC):
        fig = Figure(figsize=CANVAS, dpi=DPI)
        top, bottom = fig.subplots(2, 1)

        top.plot([z.real for z in table.a], [z.imag for z in table.a], color="black", lw=1.2)
        top.plot([table.a[0].real], [table.a[0].imag], "o", color="black", ms=4)
        xlim, ylim = _bounds(table.a)
        visible = [c for c in critical_values
                   if xlim[0] - 0.5 <= complex(c).real <= xlim[1] + 0.5 and ylim[0] - 0.5 <= complex(c).imag <= ylim[1] + 0.5]
        if visible:
            top.plot([complex(c).real for c in visible], [complex(c).imag for c in visible], "x", color="red", ms=7,
                     label="critical values")
            xlim, ylim = _bounds(list(table.a) + [complex(c) for c in visible])
        top.set_xlim(*xlim)
        top.set_ylim(*ylim)
        top.set_xlabel("Re a")
        top.set_ylabel("Im a")
        top.set_title(title or "parameter path")

        labels = table.labels
        cmap = matplotlib.colormaps["tab20"]
        allx = []
        for i, lab in enumerate(labels):
            xs = table.x[lab]
            allx.extend(xs)
            color = cmap(i % 20)
            bottom.plot([z.real for z in xs], [z.imag for z in xs], color=color, lw=1.2, label=lab)
            bottom.plot([xs[0].real], [xs[0].imag], "o", color=color, ms=3)
        bottom.axhline(0.0, color="gray", lw=0.6)
        xlim, ylim = _bounds(allx)
        bottom.set_xlim(*xlim)
        bottom.set_ylim(*ylim)
        bottom.set_xlabel("Re x")
        bottom.set_ylabel("Im x")
        bottom.set_title("root trajectories")
        bottom.legend(loc="upper right", fontsize=7, ncol=2)
        if visible:
            top.legend(loc="upper right", fontsize=7)

        fig.tight_layout()
        if fmt != "svg":
            raw = io.BytesIO()
            fig.savefig(raw, format=fmt)
            return raw.getvalue()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def plot_csv(csv_path: str, svg_path: str, critical_values=(), title: str | None = None) -> None:
    with open(csv_path, encoding="utf-8") as fh:
        table = read_trajectories(fh.read())
    write_svg(render_trajectories(table, critical_values, title), svg_path)


def write_svg(svg: str, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(svg)
