"""Deterministic fixed-step fourth-order Runge-Kutta propagation.

The models here are linear and non-stiff at the parameters of interest, so
a fixed-step classical RK4 is used: it is fourth-order accurate, has no
adaptivity state, and therefore reproduces results bit-for-bit on one
platform. The covariance is re-symmetrized after every step,
``S <- (S + S^T)/2``, to keep round-off asymmetry from accumulating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import CovarianceMatrix, FrameError, MeanVector, Trajectory
from .systems import ModelSystem

__all__ = ["IntegratorConfig", "IntegrationError", "integrate", "convergence_order"]


@dataclass(frozen=True)
class IntegratorConfig:
    """Step size, final time, and output decimation.

    ``sample_every = k`` emits every k-th step (plus the initial state), so
    the output interval is ``k*dt``.
    """

    dt: float = 1e-3
    t_end: float = 80.0
    sample_every: int = 100

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if not self.t_end > 0.0:
            raise ValueError("t_end must be > 0")
        if self.t_end / self.dt < 1.0:
            raise ValueError("t_end/dt must be >= 1")
        if self.sample_every < 1 or self.sample_every != int(self.sample_every):
            raise ValueError("sample_every must be an integer >= 1")

    @property
    def n_steps(self) -> int:
        # snap to the nearest integer when t_end/dt is one up to round-off
        raw = self.t_end / self.dt
        nearest = round(raw)
        if abs(raw - nearest) <= 1e-6:
            return int(nearest)
        return int(math.floor(raw))


class IntegrationError(RuntimeError):
    """Non-finite state encountered; reports the offending step."""

    def __init__(self, step: int, t: float):
        super().__init__(f"non-finite state at step {step} (t = {t:g})")
        self.step = step
        self.t = t


def _packed_operator(system: ModelSystem) -> tuple[np.ndarray, np.ndarray]:
    """Affine operator (M, c) for the packed state [means, cov.ravel()]."""
    d = system.frame.dim
    n = d + d * d
    m = np.zeros((n, n))
    m[:d, :d] = system.a_classical
    eye = np.eye(d)
    m[d:, d:] = np.kron(system.a_moment, eye) + np.kron(eye, system.a_moment)
    c = np.zeros(n)
    c[d:] = system.diffusion.ravel()
    return m, c


def integrate(
    system: ModelSystem,
    means0: MeanVector,
    cov0: CovarianceMatrix,
    cfg: IntegratorConfig,
) -> Trajectory:
    """Propagate a (means, covariance) state under a model system.

    Classical fourth-order accuracy; identical inputs produce bit-identical
    trajectories on one platform (fixed evaluation order, no adaptivity).
    Raises :class:`IntegrationError` as soon as the state stops being
    finite.
    """
    if means0.frame != system.frame or cov0.frame != system.frame:
        raise FrameError(
            f"initial state frame does not match system frame {system.frame.name}"
        )
    d = system.frame.dim
    mat, const = _packed_operator(system)
    y = np.concatenate([means0.values, cov0.entries.ravel()])

    # packed positions of the (i, j)/(j, i) covariance mirrors
    iu = np.array([d + i * d + j for i in range(d) for j in range(i + 1, d)], dtype=int)
    il = np.array([d + j * d + i for i in range(d) for j in range(i + 1, d)], dtype=int)

    n_steps = cfg.n_steps
    every = cfg.sample_every
    n_samples = n_steps // every + 1
    ts = np.empty(n_samples)
    means = np.empty((n_samples, d))
    covs = np.empty((n_samples, d, d))
    ts[0] = 0.0
    means[0] = y[:d]
    covs[0] = y[d:].reshape(d, d)

    h = cfg.dt
    hh = 0.5 * h
    h6 = h / 6.0
    out = 1
    # overflow is expected on divergent systems and reported as an error
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            k1 = mat @ y + const
            k2 = mat @ (y + hh * k1) + const
            k3 = mat @ (y + hh * k2) + const
            k4 = mat @ (y + h * k3) + const
            y = y + h6 * (k1 + 2.0 * (k2 + k3) + k4)
            mirror = 0.5 * (y[iu] + y[il])
            y[iu] = mirror
            y[il] = mirror
            if not math.isfinite(float(y.sum())):
                raise IntegrationError(step, step * h)
            if step % every == 0:
                ts[out] = step * h
                means[out] = y[:d]
                covs[out] = y[d:].reshape(d, d)
                out += 1

    return Trajectory(system.frame, ts, means, covs, every * h, system.params)


def convergence_order(
    system: ModelSystem,
    means0: MeanVector,
    cov0: CovarianceMatrix,
    cfg: IntegratorConfig,
) -> float:
    """Observed order from a Richardson triple at dt, dt/2, dt/4.

    Integrates to ``cfg.t_end`` three times and returns
    ``log2(|y_dt - y_dt/2| / |y_dt/2 - y_dt/4|)`` over the final packed
    state (max norm). Choose dt large enough that truncation error stays
    clear of round-off, else the estimate degrades.
    """
    finals = []
    for divisor in (1, 2, 4):
        sub = IntegratorConfig(cfg.dt / divisor, cfg.t_end, sample_every=1)
        traj = integrate(system, means0, cov0, sub)
        finals.append(np.concatenate([traj.means[-1], traj.covs[-1].ravel()]))
    err_coarse = float(np.abs(finals[0] - finals[1]).max())
    err_fine = float(np.abs(finals[1] - finals[2]).max())
    if err_fine == 0.0:
        raise ValueError("refinement errors vanished; dt too small to resolve order")
    return math.log2(err_coarse / err_fine)
