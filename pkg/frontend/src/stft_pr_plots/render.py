"""Figure rendering for the recovery harness's CSV outputs.

Each experiment kind has a documented CSV schema; this module validates the
header, never recomputes any math, and draws a fixed-size deterministic
figure (Agg backend, fixed dpi, no timestamps in the PNG metadata), so the
same CSV always renders to identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SCHEMAS = {
    "init_error_sweep": ["W", "L", "interp", "mean_error", "std_error", "trials"],
    "basin_of_attraction": ["sigma", "L", "mean_final_error", "converged_fraction"],
    "snr_sweep": ["snr_db", "L", "method", "mean_error"],
    "trace": ["iter", "loss", "error"],
    "overlay": ["n", "truth", "init", "recovered"],
    "loss_surface": ["z1", "z2", "f"],
    "window_spectrum": ["window", "k", "magnitude"],
    "theory_certificates": ["certificate", "passed", "samples", "worst_margin"],
}

SAVE_KWARGS = {"dpi": 120, "metadata": {"Software": None}}


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class FigureJob:
    csv_path: Path
    figure_kind: str
    out_path: Path


def load_table(path, kind: str) -> list[dict]:
    if kind not in SCHEMAS:
        raise SchemaError(f"unknown figure kind {kind!r}")
    expected = SCHEMAS[kind]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file")
        if header != expected:
            raise SchemaError(
                f"{path}: header {header!r} does not match the {kind} schema {expected!r}"
            )
        rows = [dict(zip(expected, row)) for row in reader]
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def _floats(rows, key):
    return np.array([float(r[key]) for r in rows])


def _fig(width=6.4, height=4.2, ncols=1):
    return plt.subplots(1, ncols, figsize=(width * ncols, height))


def _render_init_error_sweep(rows):
    interps = sorted({r["interp"] for r in rows})
    fig, axes = _fig(ncols=len(interps))
    axes = np.atleast_1d(axes)
    for ax, interp in zip(axes, interps):
        sub = [r for r in rows if r["interp"] == interp]
        Ws = sorted({int(r["W"]) for r in sub})
        Ls = sorted({int(r["L"]) for r in sub})
        grid = np.full((len(Ls), len(Ws)), np.nan)
        for r in sub:
            grid[Ls.index(int(r["L"])), Ws.index(int(r["W"]))] = float(r["mean_error"])
        im = ax.imshow(
            np.log10(np.maximum(grid, 1e-16)),
            aspect="auto",
            origin="lower",
            cmap="viridis",
        )
        ax.set_xticks(range(len(Ws)), [str(w) for w in Ws])
        ax.set_yticks(range(len(Ls)), [str(l) for l in Ls])
        ax.set_xlabel("window length W")
        ax.set_ylabel("hop L")
        ax.set_title(f"mean init error (log10), {interp} interpolation")
        fig.colorbar(im, ax=ax)
    return fig


def _render_basin(rows):
    fig, ax = _fig()
    for L in sorted({int(r["L"]) for r in rows}):
        sub = [r for r in rows if int(r["L"]) == L]
        sigma = _floats(sub, "sigma")
        err = np.maximum(_floats(sub, "mean_final_error"), 1e-16)
        order = np.argsort(sigma)
        ax.semilogy(sigma[order], err[order], marker="o", label=f"L = {L}")
    ax.set_xlabel("perturbation size sigma")
    ax.set_ylabel("mean final relative error")
    ax.set_title("basin of attraction")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def _render_snr(rows):
    Ls = sorted({int(r["L"]) for r in rows})
    fig, axes = _fig(ncols=len(Ls))
    axes = np.atleast_1d(axes)
    for ax, L in zip(axes, Ls):
        for method in sorted({r["method"] for r in rows}):
            sub = [r for r in rows if int(r["L"]) == L and r["method"] == method]
            if not sub:
                continue
            snr = _floats(sub, "snr_db")
            err = np.maximum(_floats(sub, "mean_error"), 1e-16)
            order = np.argsort(snr)
            ax.semilogy(snr[order], err[order], marker="o", label=method.upper())
        ax.set_xlabel("SNR (dB)")
        ax.set_ylabel("mean relative error")
        ax.set_title(f"L = {L}")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
    return fig


def _render_trace(rows):
    it = _floats(rows, "iter")
    loss = _floats(rows, "loss")
    fig, ax = _fig()
    norm = loss[0] if loss[0] > 0 else 1.0
    ax.semilogy(it, np.maximum(loss / norm, 1e-300), label="objective / initial")
    errors = [r["error"] for r in rows]
    if all(e != "" for e in errors):
        ax.semilogy(it, np.maximum(_floats(rows, "error"), 1e-300), label="relative error")
    ax.set_xlabel("iteration")
    ax.set_title("convergence")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return fig


def _render_overlay(rows):
    n = _floats(rows, "n")
    fig, ax = _fig()
    ax.plot(n, _floats(rows, "truth"), "k-", label="signal")
    ax.plot(n, _floats(rows, "init"), "C1--", marker=".", label="initialization")
    ax.plot(n, _floats(rows, "recovered"), "C0-", marker="o", fillstyle="none", label="recovered")
    ax.set_xlabel("sample index")
    ax.set_ylabel("amplitude")
    ax.set_title("recovery overlay")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def _render_surface(rows):
    z1 = _floats(rows, "z1")
    z2 = _floats(rows, "z2")
    f = _floats(rows, "f")
    z1v = np.unique(z1)
    z2v = np.unique(z2)
    F = np.full((len(z1v), len(z2v)), np.nan)
    F[np.searchsorted(z1v, z1), np.searchsorted(z2v, z2)] = f
    fig = plt.figure(figsize=(12.8, 4.8))
    ax3d = fig.add_subplot(1, 2, 1, projection="3d")
    B, A = np.meshgrid(z2v, z1v)
    ax3d.plot_surface(A, B, F, cmap="viridis", linewidth=0)
    ax3d.set_xlabel("z1")
    ax3d.set_ylabel("z2")
    ax3d.set_title("side view")
    ax2d = fig.add_subplot(1, 2, 2)
    cs = ax2d.contourf(A, B, F, levels=30, cmap="viridis")
    fig.colorbar(cs, ax=ax2d)
    ax2d.set_xlabel("z1")
    ax2d.set_ylabel("z2")
    ax2d.set_title("view from above")
    return fig


def _render_window_spectrum(rows):
    fig, ax = _fig()
    for label in sorted({r["window"] for r in rows}):
        sub = [r for r in rows if r["window"] == label]
        k = _floats(sub, "k")
        mag = _floats(sub, "magnitude")
        order = np.argsort(k)
        ax.plot(k[order], mag[order], label=label)
    ax.set_xlabel("DFT bin")
    ax.set_ylabel("|DFT|")
    ax.set_title("window spectra")
    ax.grid(True, alpha=0.3)
    ax.legend()
    return fig


def _render_certificates(rows):
    fig, ax = _fig(width=7.2)
    names = [r["certificate"] for r in rows]
    margins = _floats(rows, "worst_margin")
    colors = ["C2" if r["passed"] == "True" else "C3" for r in rows]
    ax.barh(range(len(names)), margins, color=colors)
    ax.set_yticks(range(len(names)), names, fontsize=8)
    ax.set_xlabel("worst margin")
    ax.set_title("theory certificates (green = pass)")
    ax.grid(True, axis="x", alpha=0.3)
    fig.tight_layout()
    return fig


RENDERERS = {
    "init_error_sweep": _render_init_error_sweep,
    "basin_of_attraction": _render_basin,
    "snr_sweep": _render_snr,
    "trace": _render_trace,
    "overlay": _render_overlay,
    "loss_surface": _render_surface,
    "window_spectrum": _render_window_spectrum,
    "theory_certificates": _render_certificates,
}


def render(job: FigureJob) -> Path:
    rows = load_table(job.csv_path, job.figure_kind)
    fig = RENDERERS[job.figure_kind](rows)
    out = Path(job.out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, **SAVE_KWARGS)
    plt.close(fig)
    return out
