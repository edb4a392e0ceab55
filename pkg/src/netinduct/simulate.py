"""Homogeneous current trajectories and empirical envelope checks."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import IO

import numpy as np
from scipy.linalg import expm  # scaling-and-squaring Pade

from .errors import SingularMatrixError
from .measures import AugmentedDynamics, MeasureReport

ENVELOPE_SLACK = 1e-9  # multiplicative round-off allowance at t = 0
_DIAG_COND_LIMIT = 1e8


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # seconds, ascending, t[0] = 0
    currents: np.ndarray  # n x T
    i0: np.ndarray
    norms: np.ndarray  # ||I(t)|| per sample


@dataclass(frozen=True)
class EnvelopeVerdict:
    lower_ok: bool
    upper_ok: bool
    lower_slack: np.ndarray  # ||I|| / (mu e^{-t/psi} ||I0||) - 1 per sample
    upper_slack: np.ndarray  # (mu' e^{-nrr t} ||I0||) / ||I|| - 1 per sample


@dataclass(frozen=True)
class DecayRates:
    fastest: float  # fit over the first 10% of the grid
    slowest: float  # fit over the last 10%


def default_time_grid(report: MeasureReport, points: int = 400) -> np.ndarray:
    """Grid covering about eight slowest time constants."""
    return np.linspace(0.0, 8.0 * report.psi_nir, points)


def homogeneous_solution(dyn: AugmentedDynamics, i0: np.ndarray,
                         t_grid: np.ndarray) -> Trajectory:
    """I(t) = exp(-L^{-1}R t) I0 on the given grid.

    I0 is projected onto the zero-sum subspace if it violates current
    conservation beyond round-off.  An eigendecomposition of L^{-1}R is used
    when well conditioned, otherwise a matrix exponential per grid point.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
        raise ValueError("t_grid must be ascending and start at 0")
    i0 = np.asarray(i0, dtype=float).copy()
    n = i0.size
    drift = abs(i0.sum())
    if drift > 1e-12 * max(np.linalg.norm(i0), 1e-300):
        warnings.warn(f"i0 violates 1^T I0 = 0 by {drift:.3e}; projecting",
                      RuntimeWarning, stacklevel=2)
        i0 = i0 - i0.sum() / n

    if np.linalg.cond(dyn.l_matrix) > 1e14:
        raise SingularMatrixError("L matrix of the dynamics is singular")
    A = np.linalg.solve(dyn.l_matrix, dyn.r_matrix)

    currents = _propagate(A, i0, t)
    norms = np.linalg.norm(currents, axis=0)
    return Trajectory(t, currents, i0, norms)


def _propagate(A: np.ndarray, i0: np.ndarray, t: np.ndarray) -> np.ndarray:
    vals, V = np.linalg.eig(A)
    use_modes = False
    if np.linalg.cond(V) < _DIAG_COND_LIMIT:
        resid = np.linalg.norm(A @ V - V * vals) / max(np.linalg.norm(A), 1e-300)
        use_modes = resid < 1e-10
    if use_modes:
        alpha = np.linalg.solve(V, i0.astype(complex))
        out = (V @ (np.exp(-np.outer(vals, t)) * alpha[:, None])).real
        return out
    cols = [i0]
    for k in range(1, t.size):
        cols.append(expm(-A * t[k]) @ i0)
    return np.column_stack(cols)


def verify_envelopes(traj: Trajectory, report: MeasureReport) -> EnvelopeVerdict:
    """Check the exponential lower/upper bounds sample by sample.

    Lower: ||I(t)|| >= mu e^{-t/psi_nir} ||I0||.
    Upper: ||I(t)|| <= mu' e^{-psi_nrr t} ||I0|| with mu' = 1/mu.
    Violations are returned as negative slack, not raised.
    """
    n0 = np.linalg.norm(traj.i0)
    if n0 == 0.0:
        z = np.zeros_like(traj.times)
        return EnvelopeVerdict(True, True, z, z)
    mu = report.mu if report.mu > 0.0 else 1.0  # zero-flagged mu: no scaling known
    lower = mu * np.exp(-traj.times / report.psi_nir) * n0
    upper = (1.0 / mu) * np.exp(-report.psi_nrr * traj.times) * n0
    lower_slack = traj.norms * (1.0 + ENVELOPE_SLACK) / lower - 1.0
    with np.errstate(divide="ignore"):
        upper_slack = upper * (1.0 + ENVELOPE_SLACK) / traj.norms - 1.0
    return EnvelopeVerdict(bool(np.all(lower_slack >= 0.0)),
                           bool(np.all(upper_slack >= 0.0)),
                           lower_slack, upper_slack)


def fit_decay_rates(traj: Trajectory) -> DecayRates:
    """Log-linear least-squares decay rates over the head and tail of the grid."""
    norms = traj.norms
    if np.all(norms == 0.0):
        raise ValueError("trajectory is identically zero")
    valid = norms > 1e-300  # underflow truncates the fit window
    t = traj.times[valid]
    y = np.log(norms[valid])
    k = max(2, int(math.ceil(0.1 * t.size)))

    def slope(ts, ys):
        A = np.column_stack([ts, np.ones_like(ts)])
        sol, *_ = np.linalg.lstsq(A, ys, rcond=None)
        return -sol[0]

    return DecayRates(fastest=float(slope(t[:k], y[:k])),
                      slowest=float(slope(t[-k:], y[-k:])))


def trajectory_csv(traj: Trajectory, dest: str | Path | IO[str]) -> None:
    """Columns: t, I_1 ... I_n, norm."""

    def _write(fh):
        w = csv.writer(fh)
        n = traj.currents.shape[0]
        w.writerow(["t"] + [f"I_{k + 1}" for k in range(n)] + ["norm"])
        for k, tk in enumerate(traj.times):
            w.writerow([repr(float(tk))]
                       + [repr(float(x)) for x in traj.currents[:, k]]
                       + [repr(float(traj.norms[k]))])

    if hasattr(dest, "write"):
        _write(dest)
    else:
        with open(dest, "w", newline="") as fh:
            _write(fh)
