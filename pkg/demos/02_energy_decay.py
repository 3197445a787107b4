"""Energy decay toward the ground state.

Integrates the thermal model for nbar in {0, 1, 2} and the two-oscillator
model, then prints the mean energy against the closed-form thermal law
E(t) = ((n - nbar) e^{-gamma t} + nbar + 1/2) hbar omega. At nbar = 0 the
two curves coincide to round-off; for nbar > 0 the energy settles on the
reservoir-dressed floor (nbar + 1/2) hbar omega instead of hbar omega / 2.
"""

import dataclasses

import numpy as np

import momentous as mm

GRID = mm.IntegratorConfig(dt=1e-3, t_end=80.0, sample_every=100)


def main():
    params = mm.ModelParams()

    means0, cov0 = mm.coherent_initial_state(params)
    sbth = mm.integrate(mm.build_sbth(params), means0, cov0, GRID)
    sbth_energy = mm.energy_report(sbth)

    print("two-oscillator model:")
    print(f"  E(0)  = {sbth_energy.e_mean[0]:.6f}   (third excited level: 3.5*1.5 = 5.25)")
    print(f"  E(80) = {sbth_energy.e_mean[-1]:.6f}  (ground-state floor: 0.75)")
    gap = np.abs(sbth_energy.e_mean - sbth_energy.e_analytic).max()
    print(f"  max |E - closed form| = {gap:.2e}")

    curves = {}
    for nbar in (0.0, 1.0, 2.0):
        p = dataclasses.replace(params, nbar=nbar)
        m0, c0 = mm.coherent_initial_state(p, mm.L1)
        run = mm.integrate(mm.build_lindblad(p), m0, c0, GRID)
        rep = mm.energy_report(run)
        curves[nbar] = rep
        floor = (nbar + 0.5) * p.hbar * p.omega
        print(f"thermal model, nbar = {nbar:g}: E(80) = {rep.e_mean[-1]:.4f}"
              f" -> floor {floor:.4f}")

    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; skipping the figure")
        return

    fig, ax = plt.subplots(figsize=(11, 5))
    for nbar, rep in curves.items():
        ax.plot(rep.ts, rep.e_mean, lw=1.2, label=f"thermal, nbar={nbar:g}")
    ax.plot(sbth_energy.ts, sbth_energy.e_mean, "--", color="darkorange",
            lw=1.6, label="two-oscillator")
    ax.plot(sbth_energy.ts, sbth_energy.e_plus, color="black", lw=0.7)
    ax.plot(sbth_energy.ts, sbth_energy.e_minus, color="black", lw=0.7,
            label="dispersion energy belt")
    ax.set_xlabel("t")
    ax.set_ylabel("mean energy")
    ax.legend(fontsize=9)
    fig.tight_layout()
    fig.savefig("energy_decay.png", dpi=130)
    print("wrote energy_decay.png")


if __name__ == "__main__":
    main()
