"""Figure rendering for the report path: every CSV the CLI writes can get a
companion PNG next to it. Plots are intentionally plain; the CSV stays the
primary artifact."""

from __future__ import annotations

import math
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _metric_series(rows, metric, key):
    xs, ys = [], []
    for r in rows:
        if r.metric == metric and key in r.params:
            xs.append(float(r.params[key]))
            ys.append(r.value)
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    return [xs[i] for i in order], [ys[i] for i in order]


def render_experiment(name: str, rows, path) -> None:
    """One figure per experiment run, keyed on its characteristic metrics."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if name == "discontinuity":
        ns, norms = _metric_series(rows, "perturbation_bmo", "n")
        _, oscs = _metric_series(rows, "osc_diff", "n")
        _, bounds = _metric_series(rows, "osc_lower_bound", "n")
        ax.loglog(ns, norms, "o-", label="input perturbation BMO norm")
        ax.loglog(ns, oscs, "s-", label="oscillation of Mf_n - Mf")
        ax.loglog(ns, [max(b, 1e-6) for b in bounds], "k--",
                  label="closed-form lower bound")
        ax.set_xlabel("ramp size n")
        ax.set_ylabel("value")
    elif name == "vmo":
        js, of = _metric_series(rows, "omega_f", "j")
        ax.semilogy(js, of, "o-", label="omega(f, 2^-j)")
        js_m, om = _metric_series(rows, "omega_mf", "j")
        if om:
            ax.semilogy(js_m, om, "s-", label="omega(Mf, 2^-j)")
        ax.set_xlabel("scale exponent j")
        ax.set_ylabel("modulus of mean oscillation")
    elif name == "product":
        js, ra = _metric_series(rows, "avg_ratio", "j")
        js2, ro = _metric_series(rows, "osc_ratio", "j")
        ax.plot(js, ra, "o-", label="sliding avg / (-log d)^p")
        ax.plot(js2, ro, "s-", label="sliding osc / (-log d)^(q-1)")
        caps, rects = _metric_series(rows, "rects_bmo", "ecc_cap")
        if caps:
            ax2 = ax.twinx()
            ax2.plot(caps, rects, "^--", color="tab:red", label="rects BMO")
            ax2.set_ylabel("rects-family BMO norm", color="tab:red")
        ax.set_xlabel("scale exponent j / eccentricity cap")
        ax.set_ylabel("measured / predicted ratio")
    elif name == "strong":
        ns, me1 = _metric_series(rows, "me1_osc_box", "N")
        ns2, ms = _metric_series(rows, "ms_osc_box", "N")
        ax.plot([math.log(n) ** 0.5 for n in ns], me1, "o-",
                label="osc of directional maximal")
        ax.plot([math.log(n) ** 0.5 for n in ns2], ms, "s-",
                label="osc of strong maximal")
        ax.set_xlabel("(log N)^(1/2)")
        ax.set_ylabel("mean oscillation on [-3,3]^2")
    elif name == "expint":
        ks, ints = _metric_series(rows, "integral", "k")
        ax.plot(ks, ints, "o-", label="exp-oscillation integral")
        ax.set_xlabel("K")
        ax.set_ylabel("integral")
    else:
        # generic: bar of values per metric
        groups = defaultdict(list)
        for r in rows:
            groups[r.metric].append(r.value)
        labels = sorted(groups)
        vals = [max(abs(v) for v in groups[m]) for m in labels]
        ax.bar(range(len(labels)), vals)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=60, ha="right", fontsize=7)
        ax.set_yscale("symlog", linthresh=1e-12)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=8)
    ax.set_title(name)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_profile(pairs, path, ylabel="maximal value") -> None:
    xs = [x for x, _ in pairs]
    ys = [v for _, v in pairs]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(xs, ys, lw=1.0)
    ax.set_xlabel("x")
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_reports(reports, path) -> None:
    """Oscillation report rows: value vs delta (if present) or refinement."""
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    withd = [r for r in reports if r.delta is not None]
    if withd:
        withd.sort(key=lambda r: r.delta)
        ax.semilogx([r.delta for r in withd], [r.value for r in withd], "o-")
        ax.set_xlabel("delta")
    else:
        ax.plot([r.refinement_level for r in reports],
                [r.value for r in reports], "o-")
        ax.set_xlabel("refinement level")
    ax.set_ylabel("oscillation supremum")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
