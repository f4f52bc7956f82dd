"""Figure rendering for sweep, optimum and trajectory outputs.

Figures are written to files next to the CSV output; nothing is shown
interactively.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

RC = {
    "font.size": 10,
    "axes.labelsize": 11,
    "legend.fontsize": 8,
    "lines.linewidth": 1.4,
    "savefig.dpi": 150,
    "savefig.bbox": "tight",
}


def _figure(width=6.0, height=4.0):
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(width, height))
    return fig, ax


def plot_sweep(rows, path, optima=None):
    """Transferred population against Omega/Delta, one line per
    (gamma_tilde, cross) pair.  Decoherence-free lines are solid, the rest
    dotted; the optimum path is drawn dashed black."""
    fig, ax = _figure()
    keys = sorted({(r.gamma_tilde, r.cross) for r in rows}, key=lambda k: (not k[1], k[0]))
    with plt.rc_context(RC):
        for g, cross in keys:
            sel = sorted((r for r in rows if r.gamma_tilde == g and r.cross == cross),
                         key=lambda r: r.omega_over_delta)
            color = "tab:red" if cross else "tab:blue"
            style = "-" if g == 0 else ":"
            label = f"{'cross' if cross else 'no cross'}, $\\tilde\\gamma$={g:g}"
            ax.plot([r.omega_over_delta for r in sel], [r.p2 for r in sel],
                    style, color=color, label=label)
        if optima:
            opt = sorted(optima, key=lambda o: o.gamma_tilde)
            ax.plot([o.omega_star_over_delta for o in opt], [o.p2_star for o in opt],
                    "--", color="k", label="optimum")
        ax.set_xlabel(r"$\Omega/\Delta$")
        ax.set_ylabel(r"$p_2$")
        ax.set_ylim(0, 1.02)
        ax.legend(loc="lower left", ncol=2)
        fig.savefig(path)
    plt.close(fig)
    return path


def plot_optima(optima, path):
    fig, ax = _figure(5.0, 3.5)
    opt = sorted(optima, key=lambda o: o.gamma_tilde)
    with plt.rc_context(RC):
        ax.plot([o.gamma_tilde for o in opt], [o.omega_star_over_delta for o in opt], "o-k")
        ax.set_xlabel(r"$\tilde\gamma = 2\pi\Gamma/\Delta$")
        ax.set_ylabel(r"$\Omega^*/\Delta$")
        fig.savefig(path)
    plt.close(fig)
    return path


def plot_trajectory(trajectory, path):
    """Populations against t*Delta from a trajectory array
    (columns t, p0, p1, p2, Re rho02, Im rho02)."""
    fig, ax = _figure()
    with plt.rc_context(RC):
        for col, label in ((1, "$p_0$"), (2, "$p_1$"), (3, "$p_2$")):
            ax.plot(trajectory[:, 0], trajectory[:, col], label=label)
        ax.set_xlabel(r"$t\Delta$")
        ax.set_ylabel("population")
        ax.legend()
        fig.savefig(path)
    plt.close(fig)
    return path
