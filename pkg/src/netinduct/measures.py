"""Network inductivity/resistivity ratios.

The homogeneous current dynamics of a network with output impedances is
R I + L dI/dt = Lap V_o.  The inductivity ratio is the reciprocal of the
fastest guaranteed decay rate of ||I(t)|| over initial conditions in the
image of the incidence matrix; the resistivity ratio is the slowest
guaranteed rate.  Closed forms exist in terms of the algebraic
connectivity (uniform outputs) or of the spectra of Lap*D products
(non-uniform output inductors/resistors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularMatrixError
from .network import PowerNetwork, build_laplacian
from .spectra import eig_product, eig_symmetric

UNIFORM_RTOL = 1e-12


@dataclass(frozen=True)
class AugmentedDynamics:
    """R and L matrices of the current dynamics, plus the assembly mode."""

    r_matrix: np.ndarray
    l_matrix: np.ndarray
    mode: str  # "uniform" | "nonuniform"


@dataclass(frozen=True)
class Assumption1Report:
    ok: bool
    eigenvalues: np.ndarray  # complex spectrum of L^{-1} R


@dataclass(frozen=True)
class MeasureReport:
    psi_nir: float  # seconds
    psi_nrr: float  # 1/seconds
    theta_nir: float  # radians
    regime: str  # "lambda2" | "lambda_max" | "degenerate"
    mu: float  # envelope constant; 0.0 flags a zero output inductor
    assumption1_ok: bool
    lambda_used: float


def assemble_dynamics(net: PowerNetwork) -> AugmentedDynamics:
    """R/L matrices; uniform form when all outputs agree, Lap*D form otherwise."""
    lap = build_laplacian(net).matrix
    n = net.n
    eye = np.eye(n)
    r, l = net.r_per_len, net.l_per_len
    if net.uniform_outputs(UNIFORM_RTOL):
        r_o = float(net.r_out_vector()[0])
        l_o = float(net.l_out_vector()[0])
        return AugmentedDynamics(r_o * lap + r * eye, l_o * lap + l * eye, "uniform")
    d_r = np.diag(net.r_out_vector())
    d_l = np.diag(net.l_out_vector())
    return AugmentedDynamics(r * eye + lap @ d_r, l * eye + lap @ d_l, "nonuniform")


def check_assumption1(dyn: AugmentedDynamics, imag_rtol: float = 1e-8) -> Assumption1Report:
    """All eigenvalues of L^{-1}R real (to tolerance) and strictly positive."""
    L = dyn.l_matrix
    if np.linalg.cond(L) > 1e14:
        raise SingularMatrixError("L matrix of the dynamics is singular")
    A = np.linalg.solve(L, dyn.r_matrix)
    vals = np.linalg.eigvals(A)
    radius = max(np.max(np.abs(vals)), 1e-300)
    ok = bool(np.max(np.abs(vals.imag)) <= imag_rtol * radius and np.min(vals.real) > 0.0)
    return Assumption1Report(ok, vals)


def _rate(lam: float, r_o: float, r: float, l_o: float, l: float) -> float:
    return (r_o * lam + r) / (l_o * lam + l)


def psi_nir_uniform(net: PowerNetwork) -> MeasureReport:
    """Inductivity/resistivity ratios for uniform output impedances.

    The decay rates of the dynamics on the zero-sum subspace are
    (r_o*lam_i + r)/(l_o*lam_i + l) over the nonzero Laplacian eigenvalues;
    the rate is monotone in lam so the extremes sit at lam_2 or lam_max
    depending on the sign of r_o/l_o - r/l.
    """
    if not net.uniform_outputs(UNIFORM_RTOL):
        raise ValueError("network has non-uniform output impedances")
    r, l = net.r_per_len, net.l_per_len
    r_o = float(net.r_out_vector()[0])
    l_o = float(net.l_out_vector()[0])

    spec = eig_symmetric(build_laplacian(net).matrix)
    lam2 = float(spec.eigenvalues[1])
    lam_max = float(spec.eigenvalues[-1])

    if r_o == 0.0 and l_o == 0.0:
        regime, lam_used = "degenerate", lam2
        psi, nrr = l / r, r / l
    elif l_o == 0.0:
        # purely resistive outputs: limit r_o/l_o -> infinity
        regime, lam_used = "lambda_max", lam_max
        psi = l / (r_o * lam_max + r)
        nrr = (r_o * lam2 + r) / l
    else:
        diff = r_o * l - r * l_o  # sign of r_o/l_o - r/l
        scale = max(abs(r_o * l), abs(r * l_o))
        if abs(diff) <= UNIFORM_RTOL * scale:
            regime, lam_used = "degenerate", lam2
            psi, nrr = l / r, r / l
        elif diff < 0.0:
            regime, lam_used = "lambda2", lam2
            psi = 1.0 / _rate(lam2, r_o, r, l_o, l)
            nrr = _rate(lam_max, r_o, r, l_o, l)
        else:
            regime, lam_used = "lambda_max", lam_max
            psi = 1.0 / _rate(lam_max, r_o, r, l_o, l)
            nrr = _rate(lam2, r_o, r, l_o, l)

    a1 = check_assumption1(assemble_dynamics(net))
    return MeasureReport(psi_nir=psi, psi_nrr=nrr,
                         theta_nir=math.atan(net.omega * psi),
                         regime=regime, mu=1.0, assumption1_ok=a1.ok,
                         lambda_used=lam_used)


def psi_nir_nonuniform(net: PowerNetwork) -> MeasureReport:
    """Ratios for per-node output impedances.

    Inductors only: psi = (lam2(D_l*Lap) + l)/r.  With resistors as well the
    spectra of Lap*D_l and Lap*D_r are index-paired ascending and the worst
    quotient over indices 2..n is taken.
    """
    lap = build_laplacian(net)
    r, l = net.r_per_len, net.l_per_len
    d_r = net.r_out_vector()
    d_l = net.l_out_vector()

    lam_l = eig_product(d_l, lap).eigenvalues
    if np.all(d_r == 0.0):
        lam2 = float(lam_l[1])
        lam_max = float(lam_l[-1])
        psi = (lam2 + l) / r
        nrr = r / (lam_max + l)
        lam_used = lam2
    else:
        lam_r = eig_product(d_r, lap).eigenvalues
        quot = (lam_l[1:] + l) / (lam_r[1:] + r)
        k = int(np.argmin(quot))
        psi = float(quot[k])
        nrr = float(np.min((lam_r[1:] + r) / (lam_l[1:] + l)))
        lam_used = float(lam_l[1:][k])

    mn, mx = float(np.min(d_l)), float(np.max(d_l))
    mu = math.sqrt(mn / mx) if mn > 0.0 and mx > 0.0 else 0.0

    a1 = check_assumption1(assemble_dynamics(net))
    return MeasureReport(psi_nir=psi, psi_nrr=nrr,
                         theta_nir=math.atan(net.omega * psi),
                         regime="lambda2", mu=mu, assumption1_ok=a1.ok,
                         lambda_used=lam_used)


def measure_report(net: PowerNetwork) -> MeasureReport:
    """Dispatch on output uniformity."""
    if net.uniform_outputs(UNIFORM_RTOL):
        return psi_nir_uniform(net)
    return psi_nir_nonuniform(net)


def theta_nir(report: MeasureReport, omega: float) -> float:
    """Reactance-to-resistance angle arctan(omega * psi_nir), in (0, pi/2)."""
    if omega <= 0:
        raise ValueError("omega must be > 0")
    return math.atan(omega * report.psi_nir)
