"""The figure renderers: one function per campaign-output kind.

Every renderer takes input CSV path(s) and an output image path, embeds the
input's manifest hash in both the figure caption and the image metadata,
and returns the hash.  Inputs are read-only.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import EmptyInputError, SchemaError, read_table, require_columns  # noqa: E402

KINDS = ("ensemble", "arcs", "coefficients", "spectrum", "klbias", "surface")


def _finish(fig, out_path, meta) -> str:
    h = meta.get("manifest_hash", "unknown")
    fig.text(0.01, 0.01, f"manifest {h}", fontsize=6, alpha=0.7)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, metadata=_image_metadata(out_path, h))
    plt.close(fig)
    return h


def _image_metadata(out_path, h) -> dict:
    suffix = out_path.suffix.lower()
    if suffix == ".png":
        return {"manifest_hash": h}
    if suffix in (".svg", ".pdf"):
        return {"Title": f"manifest {h}"}
    return {}


def render_ensemble(in_path, out_path) -> str:
    """Bloch-sphere scatter of the projected logical ensemble (records.csv)."""
    cols, meta = read_table(in_path)
    require_columns(cols, ["theta", "phi", "kx", "ky", "kz"], in_path)
    fig = plt.figure(figsize=(10, 4))
    keys = sorted({(t, p) for t, p in zip(cols["theta"], cols["phi"])})
    for i, (theta, phi) in enumerate(keys[:3]):
        ax = fig.add_subplot(1, min(3, len(keys)), i + 1, projection="3d")
        sel = (cols["theta"] == theta) & (cols["phi"] == phi)
        ax.scatter(cols["kx"][sel], cols["ky"][sel], cols["kz"][sel],
                   s=3, alpha=0.4)
        ax.set_title(f"theta={theta / math.pi:.2f}pi, phi={phi / math.pi:.2f}pi",
                     fontsize=8)
        ax.set_xlim(-1, 1), ax.set_ylim(-1, 1), ax.set_zlim(-1, 1)
        ax.set_box_aspect((1, 1, 1))
    fig.suptitle("projected logical ensemble")
    return _finish(fig, out_path, meta)


def render_arcs(profiles_path, out_path, arcs_path=None) -> str:
    """Entanglement arcs S(l) with fitted curves (profiles.csv [+ arcs.csv])."""
    cols, meta = read_table(profiles_path)
    require_columns(cols, ["theta", "phi", "L", "l", "S_mean_bits"],
                    profiles_path)
    fits = None
    if arcs_path is not None:
        fcols, _ = read_table(arcs_path)
        require_columns(fcols, ["theta", "phi", "L", "v", "c_prime", "c", "a"],
                        arcs_path)
        fits = fcols
    fig, ax = plt.subplots(figsize=(6, 4))
    keys = sorted({(t, p, L) for t, p, L in
                   zip(cols["theta"], cols["phi"], cols["L"])})
    for theta, phi, L in keys:
        sel = (cols["theta"] == theta) & (cols["phi"] == phi) & (cols["L"] == L)
        l = cols["l"][sel]
        s = cols["S_mean_bits"][sel]
        label = f"phi={phi / math.pi:.2f}pi"
        pts = ax.plot(l, s, ".", ms=4, label=label)
        if fits is not None:
            fsel = np.where((fits["theta"] == theta) & (fits["phi"] == phi)
                            & (fits["L"] == L))[0]
            if len(fsel):
                i = fsel[0]
                lf = np.linspace(max(1, L / 8), 7 * L / 8, 200)
                logr = np.log((L / math.pi) * np.sin(math.pi * lf / L))
                curve = (fits["v"][i] * np.minimum(lf, L - lf)
                         + fits["c_prime"][i] / 6 * logr ** 2
                         + fits["c"][i] / 6 * logr + fits["a"][i])
                ax.plot(lf, curve / math.log(2), "-", lw=1,
                        color=pts[0].get_color())
    ax.set_xlabel("l")
    ax.set_ylabel("S(l) [bits]")
    ax.legend(fontsize=7)
    ax.set_title("boundary entanglement arcs")
    return _finish(fig, out_path, meta)


def render_coefficients(in_path, out_path) -> str:
    """Arc-fit coefficients vs measurement angle (arcs.csv)."""
    cols, meta = read_table(in_path)
    require_columns(cols, ["theta", "phi", "L", "v", "c_prime", "c"], in_path)
    angle = cols["phi"] if len(set(cols["phi"])) >= len(set(cols["theta"])) \
        else cols["theta"]
    fig, axes = plt.subplots(3, 1, figsize=(5, 7), sharex=True)
    for ax, key, name in zip(axes, ("v", "c_prime", "c"),
                             ("v", "c'", "c")):
        for L in sorted(set(cols["L"])):
            sel = cols["L"] == L
            order = np.argsort(angle[sel])
            ax.plot(angle[sel][order] / math.pi, cols[key][sel][order],
                    "o-", ms=4, label=f"L={int(L)}")
        ax.set_ylabel(name)
        ax.axhline(0.0, color="k", lw=0.5, alpha=0.4)
    axes[0].legend(fontsize=7)
    axes[-1].set_xlabel("angle / pi")
    fig.suptitle("entanglement-arc coefficients")
    return _finish(fig, out_path, meta)


def render_spectrum(spectrum_path, out_path, summary_path=None) -> str:
    """Floquet quasi-energy spectra, optionally annotated with rho_0."""
    cols, meta = read_table(spectrum_path)
    require_columns(cols, ["J", "phi", "k", "eps_re", "eps_im"], spectrum_path)
    rho = None
    if summary_path is not None:
        scols, _ = read_table(summary_path)
        require_columns(scols, ["J", "phi", "rho_0"], summary_path)
        rho = scols
    keys = sorted({(j, p) for j, p in zip(cols["J"], cols["phi"])})
    n = min(len(keys), 4)
    fig, axes = plt.subplots(1, n, figsize=(3 * n, 3), squeeze=False)
    for ax, (J, phi) in zip(axes[0], keys[:n]):
        sel = (cols["J"] == J) & (cols["phi"] == phi)
        ax.plot(cols["k"][sel], cols["eps_re"][sel], ".", ms=2, label="Re eps")
        ax.plot(cols["k"][sel], cols["eps_im"][sel], ".", ms=2, label="Im eps")
        title = f"J={J:.3f}, phi={phi:.3f}"
        if rho is not None:
            rsel = np.where((rho["J"] == J) & (rho["phi"] == phi))[0]
            if len(rsel):
                title += f", rho0={rho['rho_0'][rsel[0]]:.3f}"
        ax.set_title(title, fontsize=8)
        ax.set_xlabel("k")
    axes[0][0].set_ylabel("quasi-energy")
    axes[0][0].legend(fontsize=6)
    return _finish(fig, out_path, meta)


def render_klbias(in_path, out_path) -> str:
    """Finite-sample KL bias vs samples/N, one curve per order (kl.csv)."""
    cols, meta = read_table(in_path)
    require_columns(cols, ["order", "N", "samples", "D"], in_path)
    fig, ax = plt.subplots(figsize=(5, 4))
    for order in sorted(set(cols["order"])):
        sel = cols["order"] == order
        x = cols["samples"][sel] / cols["N"][sel]
        order_idx = np.argsort(x)
        ax.loglog(x[order_idx], np.maximum(cols["D"][sel][order_idx], 1e-6),
                  "o-", ms=4, label=f"order {int(order)}")
    ax.set_xlabel("samples / N")
    ax.set_ylabel("D(P||Q)")
    ax.set_title("KL finite-sample bias")
    ax.legend(fontsize=7)
    return _finish(fig, out_path, meta)


def render_surface(in_path, out_path) -> str:
    """Coherent-information threshold map over (angle, t) (coherent.csv)."""
    cols, meta = read_table(in_path)
    require_columns(cols, ["theta", "phi", "t", "I_c_bits"], in_path)
    angle = cols["phi"] if len(set(cols["phi"])) >= len(set(cols["theta"])) \
        else cols["theta"]
    angles = np.array(sorted(set(angle)))
    ts = np.array(sorted(set(cols["t"])))
    grid = np.full((len(ts), len(angles)), np.nan)
    for a, t, ic in zip(angle, cols["t"], cols["I_c_bits"]):
        grid[np.searchsorted(ts, t), np.searchsorted(angles, a)] = ic
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.pcolormesh(angles / math.pi, ts / math.pi, grid, cmap="viridis",
                       vmin=0.0, vmax=1.0, shading="nearest")
    fig.colorbar(im, ax=ax, label="I_c [bits]")
    ax.set_xlabel("angle / pi")
    ax.set_ylabel("t / pi")
    ax.set_title("coherent-information threshold surface")
    return _finish(fig, out_path, meta)


RENDERERS = {
    "ensemble": render_ensemble,
    "arcs": render_arcs,
    "coefficients": render_coefficients,
    "spectrum": render_spectrum,
    "klbias": render_klbias,
    "surface": render_surface,
}
