"""CSV report writers and the matplotlib figures rendered alongside them.

CSV output is byte-stable: '.' decimals, shortest round-trip float
representation, '\\n' line endings, rows in sweep order. Figures (PNG) are
companions for quick inspection and carry no reproducibility contract.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .matrixio import fmt_float  # noqa: E402

SUCCESS_CSV_HEADER = "ensemble,param,trials,successes,rate,mean_rel_error,mean_iterations"

IMAGE_CSV_HEADER = "ensemble,n,N,sparsity,mse,iterations,status"

_MARKERS = {"gaussian": "o", "bernoulli": "s", "s-mixed": "^", "three-point": "d"}


def success_curves_rows(curves: dict) -> list[str]:
    rows = []
    for ensemble, curve in curves.items():
        for pt in curve.points:
            rows.append(",".join([
                ensemble, str(pt.param), str(pt.trials), str(pt.successes),
                fmt_float(pt.rate), fmt_float(pt.mean_rel_error),
                fmt_float(pt.mean_iterations),
            ]))
    return rows


def write_success_curves_csv(path, curves: dict, trailer: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(SUCCESS_CSV_HEADER + "\n")
        for row in success_curves_rows(curves):
            fh.write(row + "\n")
        if trailer:
            fh.write(trailer + "\n")


def write_lines_csv(path, header: str, lines) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for line in lines:
            fh.write(line + "\n")


def plot_success_curves(curves: dict, param_label: str, path) -> None:
    """One success-rate line per ensemble against the swept parameter."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for ensemble, curve in curves.items():
        xs = [pt.param for pt in curve.points]
        ys = [pt.rate for pt in curve.points]
        ax.plot(xs, ys, marker=_MARKERS.get(ensemble, "x"), label=ensemble)
    ax.set_xlabel(param_label)
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_image_panel(original, reconstructions, path) -> None:
    """Original plus per-ensemble reconstructions with their error in the title.

    reconstructions: list of (label, image, mse).
    """
    cols = 1 + len(reconstructions)
    fig, axes = plt.subplots(1, cols, figsize=(2.6 * cols, 3.0))
    if cols == 1:
        axes = [axes]
    axes[0].imshow(original, cmap="gray", vmin=0.0, vmax=1.0)
    axes[0].set_title("original", fontsize=9)
    for ax, (label, img, mse) in zip(axes[1:], reconstructions):
        ax.imshow(img, cmap="gray", vmin=0.0, vmax=1.0)
        ax.set_title(f"{label} (MSE={mse:.4f})", fontsize=9)
    for ax in axes:
        ax.set_xticks([])
        ax.set_yticks([])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_spectral_reports(reports, predicted_labels, path) -> None:
    """Observed extreme values per seed with the predicted edges as lines."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = list(range(len(reports)))
    ax.plot(xs, [r.observed_max for r in reports], "o", label="observed max")
    ax.plot(xs, [r.observed_min for r in reports], "s", label="observed min")
    if reports:
        ax.axhline(reports[0].predicted_max, color="k", lw=1, ls="--",
                   label=predicted_labels[1])
        ax.axhline(reports[0].predicted_min, color="gray", lw=1, ls="--",
                   label=predicted_labels[0])
    ax.set_xlabel("seed index")
    ax.set_ylabel("spectral edge")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
