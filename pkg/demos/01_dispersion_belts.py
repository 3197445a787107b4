"""Mean position and momentum with their dispersion belts.

Runs the standard configuration (gamma = 0.08, omega = Omega = 1.5,
lambda = 0.04, m = hbar = 1, n = 3) for both models and prints the belt
geometry x(t) +/- sqrt(G20) and p(t) +/- sqrt(G02). The two-oscillator
belts keep a constant width (the coherent covariance is a fixed point of
its moment flow), while the thermal belts widen with the reservoir
occupation nbar.

A plot is saved when matplotlib is available; the numbers print either way.
"""

import dataclasses

import numpy as np

import momentous as mm

GRID = mm.IntegratorConfig(dt=1e-3, t_end=80.0, sample_every=100)


def sbth_belts(params):
    means0, cov0 = mm.coherent_initial_state(params)
    run = mm.integrate(mm.build_sbth(params), means0, cov0, GRID)
    cols = mm.trajectory_columns(run, ["t", "x", "p", "G20", "G02"])
    return cols


def lindblad_belts(params, nbar):
    p = dataclasses.replace(params, nbar=nbar)
    means0, cov0 = mm.coherent_initial_state(p, mm.L1)
    run = mm.integrate(mm.build_lindblad(p), means0, cov0, GRID)
    return mm.trajectory_columns(run, ["t", "x", "p", "G20", "G02"])


def describe(name, cols):
    sx = np.sqrt(cols["G20"])
    sp = np.sqrt(cols["G02"])
    print(f"{name}:")
    print(f"  position belt half-width: {sx[0]:.4f} at t=0, {sx[-1]:.4f} at t=80")
    print(f"  momentum belt half-width: {sp[0]:.4f} at t=0, {sp[-1]:.4f} at t=80")
    print(f"  mean position envelope: {np.abs(cols['x']).max():.4f} down to "
          f"{np.abs(cols['x'][-20:]).max():.4f}")


def main():
    params = mm.ModelParams()
    two_osc = sbth_belts(params)
    thermal = lindblad_belts(params, nbar=2.0)

    describe("two-oscillator model (belts stay put)", two_osc)
    describe("thermal model, nbar = 2 (belts widen)", thermal)

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the figure")
        return

    fig, axes = plt.subplots(2, 1, figsize=(11, 7), sharex=True)
    for ax, field, width, label in (
        (axes[0], "x", "G20", "position"),
        (axes[1], "p", "G02", "momentum"),
    ):
        t = two_osc["t"]
        for cols, color, name in ((thermal, "goldenrod", "thermal nbar=2"),
                                  (two_osc, "purple", "two-oscillator")):
            half = np.sqrt(cols[width])
            ax.fill_between(t, cols[field] - half, cols[field] + half,
                            color=color, alpha=0.35, label=f"{name} belt")
        ax.plot(t, two_osc[field], color="crimson", lw=1.0, label="mean")
        ax.set_ylabel(label)
        ax.legend(loc="upper right", fontsize=8)
    axes[1].set_xlabel("t")
    fig.tight_layout()
    fig.savefig("dispersion_belts.png", dpi=130)
    print("wrote dispersion_belts.png")


if __name__ == "__main__":
    main()
