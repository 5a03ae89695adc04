"""SVG line plots for the increasing-shift study.

Rendering is pinned down (Agg backend, fixed hash salt, no date
metadata) so repeated runs write byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .experiments import METHOD_ORDER, SummaryRow  # noqa: E402

plt.rcParams["svg.hashsalt"] = "fedcsa"

_SHIFT_PREFIX = "case2_c="


def _shift_table(rows: Iterable[SummaryRow]) -> dict[str, list[tuple[float, float]]]:
    """{method: [(c, mean), ...] sorted by c} from case2 summary rows."""
    table: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        if not row.scenario.startswith(_SHIFT_PREFIX):
            continue
        c = float(row.scenario[len(_SHIFT_PREFIX):])
        table.setdefault(row.method, []).append((c, row.mean))
    for points in table.values():
        points.sort()
    return table


def _save(fig, path: str | Path) -> None:
    fig.savefig(Path(path), format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_case2_means(rows: Iterable[SummaryRow], path: str | Path) -> None:
    """Mean MAE against the shift parameter, one line per method."""
    table = _shift_table(rows)
    if not table:
        raise ValueError("no case2 rows to plot")
    fig, ax = plt.subplots(figsize=(6, 4))
    for method in METHOD_ORDER:
        if method not in table:
            continue
        cs, means = zip(*table[method])
        ax.plot(cs, means, marker="o", label=method)
    ax.set_xlabel("shift c")
    ax.set_ylabel("mean MAE")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)


def plot_case2_ratio(rows: Iterable[SummaryRow], path: str | Path) -> None:
    """Mean-MAE ratio FedIW / FedDA against the shift parameter."""
    table = _shift_table(rows)
    if "FedIW" not in table or "FedDA" not in table:
        raise ValueError("ratio plot needs FedIW and FedDA rows")
    iw = dict(table["FedIW"])
    da = dict(table["FedDA"])
    cs = sorted(set(iw) & set(da))
    if not cs:
        raise ValueError("no shared shift values between FedIW and FedDA")
    ratios = [iw[c] / da[c] for c in cs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(cs, ratios, marker="o", color="tab:purple")
    ax.axhline(1.0, linestyle=":", color="gray", linewidth=1)
    ax.set_xlabel("shift c")
    ax.set_ylabel("mean MAE ratio FedIW / FedDA")
    fig.tight_layout()
    _save(fig, path)
