"""Convergence figures: log-scale error against oracle or subgradient counts."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.ticker import LogLocator  # noqa: E402

Y_LABELS = {
    "dist": r"distance to minimizer $|x - x_{\min}|$",
    "gap": r"objective gap $f(x) - f(x_{\min})$",
}
X_LABELS = {
    "calls": "Goldstein oracle calls",
    "evals": "subgradient evaluations",
}


def _x_values(trace, x: str):
    """Counter column for the x axis and whether it counts approximate calls."""
    if x == "evals":
        return trace.column("s_subgrad"), False
    gold = trace.column("s_goldstein")
    if any(gold):
        return gold, False
    return trace.column("s_approx"), True


def plot_convergence(traces, labels, y: str = "dist", x: str = "calls", out=None, title=None):
    """Draw one log-y line per trace and save to ``out`` (format from suffix).

    Nonpositive y values are dropped since they have no place on a log axis.
    """
    if y not in Y_LABELS:
        raise ValueError(f"y must be one of {sorted(Y_LABELS)}")
    if x not in X_LABELS:
        raise ValueError(f"x must be one of {sorted(X_LABELS)}")
    if not traces or any(len(t) == 0 for t in traces):
        raise ValueError("cannot plot an empty trace")

    with plt.rc_context({"svg.hashsalt": "goldstein", "font.size": 11}):
        fig, ax = plt.subplots(figsize=(8, 6), dpi=100)
        approx = False
        for trace, label in zip(traces, labels):
            xcol, is_approx = _x_values(trace, x)
            approx |= is_approx
            xs, ys = [], []
            for xv, yv in zip(xcol, trace.column(y)):
                if yv > 0:
                    xs.append(xv)
                    ys.append(yv)
            ax.plot(xs, ys, marker=".", markersize=3, linewidth=1.2, label=label)
        ax.set_yscale("log")
        ax.yaxis.set_major_locator(LogLocator(base=10.0))
        ax.grid(True, which="major", axis="y", linewidth=0.6, alpha=0.6)
        ax.set_xlabel("approximate " + X_LABELS[x] if approx else X_LABELS[x])
        ax.set_ylabel(Y_LABELS[y])
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        fig.tight_layout()
        if out is not None:
            fig.savefig(out, metadata={"Date": None} if str(out).endswith(".svg") else None)
        plt.close(fig)
    return out
