"""Matplotlib rendering for the report-producing CLI commands.

Figures are a viewing convenience written next to the delimited output;
the CSV/JSON files remain the exact record (floats appear only here).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .hilbert_samuel import HSReport
from .positivity import DistributionProfile

_DPI = 150


def render_hs_convergence(report: HSReport, path: str) -> None:
    ns = [row.n for row in report.rows]
    ratios = [float(row.ratio) for row in report.rows]
    gaps = [float(row.gap) for row in report.rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax1.plot(ns, ratios, "o-", label="deg(n) / (n^2/2)")
    ax1.axhline(float(report.target_vol_chi), color="0.4", ls="--", label="chi-volume")
    ax1.set_xlabel("n")
    ax1.set_ylabel("ratio")
    ax1.legend(frameon=False, fontsize=8)
    ax2.loglog(ns, gaps, "s-")
    ax2.set_xlabel("n")
    ax2.set_ylabel("|ratio - target|")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_profile(profile: DistributionProfile, path: str) -> None:
    lam = float(profile.lambda_threshold)
    first = float(profile.vertices[0][0])
    span = max(lam - first, 1.0)
    ts = [first - 0.25 * span]
    vs = [float(profile.degree)]
    for t, v in profile.vertices:
        ts.append(float(t))
        vs.append(float(v))
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.4))
    ax1.plot(ts, vs, "-")
    ax1.plot([lam, lam + 0.25 * span], [0.0, 0.0], "-", color="C0")
    jump = float(profile.vertices[-1][1])
    if jump > 0:
        ax1.plot([lam, lam], [jump, 0.0], ":", color="C0")
    ax1.set_xlabel("t")
    ax1.set_ylabel("deg of the threshold divisor")
    qv = profile.quantile_vertices()
    ax2.plot([float(u) for u, _ in qv], [float(t) for _, t in qv], "-")
    ax2.set_xlabel("u")
    ax2.set_ylabel("quantile")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_inequality_margins(counts: dict[str, int], path: str) -> None:
    names = list(counts)
    values = [counts[n] for n in names]
    fig, ax = plt.subplots(figsize=(7, 3.2))
    ax.barh(range(len(names)), values)
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=7)
    ax.set_xlabel("checks run")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
