"""Output-inductor design.

Uniform design inverts the closed-form angle target; non-uniform design
maximizes the algebraic connectivity of diag(l_o) * Laplacian over the
budget simplex with a deterministic multi-start transfer search.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .kron import kron_reduce_real
from .network import PowerNetwork, WeightedLaplacian, build_laplacian
from .spectra import algebraic_connectivity, eig_product, eig_symmetric, sqrtm_psd

_START_PRIMES = (2, 3, 5, 7, 11, 13)


@dataclass(frozen=True)
class AllocationProblem:
    laplacian: WeightedLaplacian | np.ndarray
    budget: float  # henry
    lower_bounds: np.ndarray | None = None
    r_per_len: float | None = None
    l_per_len: float | None = None
    omega: float | None = None
    extra_starts: int = 8
    tol: float = 1e-10
    max_passes: int = 10_000

    def matrix(self) -> np.ndarray:
        L = self.laplacian
        return L.matrix if isinstance(L, WeightedLaplacian) else np.asarray(L, dtype=float)

    def bounds(self) -> np.ndarray:
        n = self.matrix().shape[0]
        b = np.zeros(n) if self.lower_bounds is None else np.asarray(self.lower_bounds, dtype=float)
        if b.shape != (n,):
            raise ValidationError(f"lower_bounds: expected {n} entries")
        if np.any(b < 0):
            raise ValidationError("lower_bounds: negative entry")
        if self.budget <= 0:
            raise ValidationError(f"budget: must be > 0, got {self.budget}")
        if b.sum() > self.budget * (1 + 1e-12):
            raise ValidationError("lower_bounds: sum exceeds the budget")
        return b


@dataclass(frozen=True)
class AllocationResult:
    allocation: np.ndarray
    lam2: float
    psi_nir: float | None
    theta_nir: float | None
    diagnostics: dict = field(default_factory=dict)


def _objective(sqL: np.ndarray):
    def lam2(d: np.ndarray) -> float:
        vals = np.linalg.eigvalsh(sqL * d @ sqL)  # sqL @ diag(d) @ sqL
        return float(vals[1])

    return lam2


def _starts(b: np.ndarray, free: float, extra: int) -> list[np.ndarray]:
    n = b.size
    pts = [b + free / n]
    for i in range(n):
        v = b.copy()
        v[i] += free
        pts.append(v)
    # deterministic low-discrepancy interior points (Kronecker sequence)
    roots = np.sqrt(np.array(_START_PRIMES[:n], dtype=float))
    for k in range(1, extra + 1):
        u = np.mod(k * roots, 1.0) + 0.05
        pts.append(b + free * u / u.sum())
    return pts


def _transfer_search(f, d0: np.ndarray, b: np.ndarray, free: float,
                     tol: float, max_passes: int) -> tuple[np.ndarray, float, int]:
    """Pairwise budget transfers with shrinking step; stays on the simplex exactly."""
    n = d0.size
    d = d0.copy()
    best = f(d)
    step = free / 4.0
    passes = 0
    floor = max(1e-12 * free, 1e-300)
    while step > floor and passes < max_passes:
        improved = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                delta = min(step, d[j] - b[j])
                if delta <= 0.0:
                    continue
                cand = d.copy()
                cand[j] -= delta
                cand[i] += delta
                fc = f(cand)
                if fc > best + tol * abs(best):
                    d, best, improved = cand, fc, True
        passes += 1
        if not improved:
            step *= 0.5
    return d, best, passes


def optimize_allocation(problem: AllocationProblem) -> AllocationResult:
    """Maximize lam2(diag(d) * L) over {d >= bounds, sum d = budget}.

    Deterministic multi-start local search; ties across starts break toward
    the lexicographically smallest allocation.
    """
    L = problem.matrix()
    b = problem.bounds()
    c = problem.budget
    free = c - b.sum()
    sqL = sqrtm_psd(L)
    f = _objective(sqL)

    results = []
    total_passes = 0
    for d0 in _starts(b, free, problem.extra_starts):
        d, val, passes = _transfer_search(f, d0, b, free, problem.tol, problem.max_passes)
        total_passes += passes
        results.append((val, tuple(d), d))
    results.sort(key=lambda t: (-t[0], t[1]))
    best_val, _, best = results[0]

    # exact budget: rescale the free part
    spent = best - b
    if spent.sum() > 0:
        best = b + spent * (free / spent.sum())

    lam2 = float(eig_product(best, L).eigenvalues[1])
    psi = theta = None
    if problem.r_per_len is not None and problem.l_per_len is not None:
        psi = (lam2 + problem.l_per_len) / problem.r_per_len
        if problem.omega is not None:
            theta = math.atan(problem.omega * psi)
    med = float(np.median([r[0] for r in results]))
    return AllocationResult(best, lam2, psi, theta, {
        "starts": len(results),
        "passes": total_passes,
        "best_vs_median_gap": best_val - med,
    })


def allocation_landscape(problem: AllocationProblem, resolution: int) -> np.ndarray:
    """lam2 on a regular barycentric grid of the budget simplex.

    Rows are (k_1/resolution, ..., k_n/resolution, lam2); the allocation at
    a row is bounds + free_budget * coordinates.
    """
    L = problem.matrix()
    n = L.shape[0]
    if n > 6:
        raise ValidationError(f"landscape grid needs n <= 6 nodes, got {n}")
    if resolution < 1:
        raise ValidationError("resolution must be >= 1")
    b = problem.bounds()
    free = problem.budget - b.sum()
    f = _objective(sqrtm_psd(L))

    rows = []
    for combo in itertools.combinations(range(resolution + n - 1), n - 1):
        ks = np.diff((-1,) + combo + (resolution + n - 1,)) - 1
        coords = ks / resolution
        rows.append(np.concatenate([coords, [f(b + free * coords)]]))
    return np.array(rows)


def _reduced_lam2(net: PowerNetwork, sources=None):
    lap = build_laplacian(net)
    if sources is not None:
        red = kron_reduce_real(lap, sources)
        matrix = red.matrix
    else:
        matrix = lap.matrix
    lam2 = algebraic_connectivity(eig_symmetric(matrix)).value
    return matrix, lam2


def design_uniform(net: PowerNetwork, target_theta: float, sources=None,
                   r_out: float = 0.0) -> float:
    """Uniform output inductance reaching a target impedance angle.

    Solves arctan(omega * (l_o lam2 + l)/(r_o lam2 + r)) = target for l_o,
    with lam2 taken from the (optionally Kron-reduced) Laplacian.
    """
    r, l, omega = net.r_per_len, net.l_per_len, net.omega
    _, lam2 = _reduced_lam2(net, sources)
    current = math.atan(omega * l / r)
    if not current <= target_theta < math.pi / 2:
        raise ValidationError(
            f"target theta {target_theta!r} not in [{current!r}, pi/2)")
    return (math.tan(target_theta) / omega * (r_out * lam2 + r) - l) / lam2


def design_nonuniform(net: PowerNetwork, target_theta: float, sources=None,
                      extra_starts: int = 8, tol: float = 1e-10) -> AllocationResult:
    """Minimal-budget non-uniform allocation reaching a target angle.

    lam2(diag(d) L) is positively homogeneous in d, so the optimal direction
    is independent of the budget scale: optimize once at unit budget, then
    the minimal budget follows in closed form from (lam2 + l)/r = tan(theta)/omega.
    """
    r, l, omega = net.r_per_len, net.l_per_len, net.omega
    matrix, _ = _reduced_lam2(net, sources)
    current = math.atan(omega * l / r)
    if not current < target_theta < math.pi / 2:
        raise ValidationError(
            f"target theta {target_theta!r} not in ({current!r}, pi/2)")

    unit = optimize_allocation(AllocationProblem(matrix, 1.0, extra_starts=extra_starts, tol=tol))
    lam2_hat = unit.lam2  # lam2 per unit budget along the optimal direction
    psi_target = math.tan(target_theta) / omega
    budget = (r * psi_target - l) / lam2_hat
    alloc = unit.allocation * budget
    lam2 = float(eig_product(alloc, matrix).eigenvalues[1])
    psi = (lam2 + l) / r
    return AllocationResult(alloc, lam2, psi, math.atan(omega * psi), {
        "budget": budget,
        "starts": unit.diagnostics["starts"],
        "passes": unit.diagnostics["passes"],
        "best_vs_median_gap": unit.diagnostics["best_vs_median_gap"],
    })
