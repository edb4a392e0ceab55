"""Command-line front end.

Commands: analyze, kron, simulate, optimize, landscape, sweep.
Exit codes: 0 success, 2 input error, 3 numerical error.  All numeric JSON
output uses Python's round-trip float representation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import allocate, kron, measures, simulate
from .errors import NetinductError, ParseError, SpectralMismatchError, \
    ValidationError
from .network import PowerNetwork, build_laplacian, load_network
from .spectra import algebraic_connectivity, eig_symmetric


def _load(args) -> PowerNetwork:
    net = load_network(args.network)
    if getattr(args, "omega", None) is not None or getattr(args, "lo", None) is not None \
            or getattr(args, "ro", None) is not None:
        net = net.with_outputs(r_out=getattr(args, "ro", None),
                               l_out=getattr(args, "lo", None),
                               omega=getattr(args, "omega", None))
    return net


def _emit(text: str, args) -> None:
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_dict(rep: measures.MeasureReport) -> dict:
    return {
        "psi_nir": rep.psi_nir,
        "psi_nrr": rep.psi_nrr,
        "theta_nir": rep.theta_nir,
        "regime": rep.regime,
        "lambda_used": rep.lambda_used,
        "mu": rep.mu,
        "assumption1_ok": rep.assumption1_ok,
    }


def cmd_analyze(args) -> int:
    net = _load(args)
    rep = measures.measure_report(net)
    _emit(json.dumps(_report_dict(rep), indent=2) + "\n", args)
    return 0


def _parse_sources(spec: str, net: PowerNetwork) -> list[int]:
    if spec == "all":
        return list(net.node_ids())
    try:
        return [int(s) for s in spec.split(",") if s]
    except ValueError as exc:
        raise ValidationError(f"sources: {exc}") from exc


def cmd_kron(args) -> int:
    net = _load(args)
    if args.phasor:
        red = kron.phasor_reduce(net)
        records = kron.line_angles(red, net)
        buf = io.StringIO()
        kron.angle_table_csv(records, buf)
        _emit(buf.getvalue(), args)
        return 0
    lap = build_laplacian(net)
    red = kron.kron_reduce_real(lap, _parse_sources(args.sources, net))
    lam2 = algebraic_connectivity(eig_symmetric(red.matrix)).value
    _emit(json.dumps({
        "node_ids": list(red.node_ids()),
        "laplacian": red.matrix.tolist(),
        "lambda2": lam2,
    }, indent=2) + "\n", args)
    return 0


def _worst_case_i0(net: PowerNetwork, dyn: measures.AugmentedDynamics,
                   rep: measures.MeasureReport) -> np.ndarray:
    """Eigenvector of L^-1 R whose rate is closest to the guaranteed 1/psi."""
    A = np.linalg.solve(dyn.l_matrix, dyn.r_matrix)
    vals, vecs = np.linalg.eig(A)
    k = int(np.argmin(np.abs(vals - 1.0 / rep.psi_nir)))
    v = np.real(vecs[:, k])
    v = v - v.sum() / v.size
    nrm = np.linalg.norm(v)
    if nrm == 0.0:
        raise SpectralMismatchError("worst-case eigenvector collapsed onto the ones vector")
    return v / nrm


def cmd_simulate(args) -> int:
    net = _load(args)
    rep = measures.measure_report(net)
    dyn = measures.assemble_dynamics(net)
    if args.worst_case:
        i0 = _worst_case_i0(net, dyn, rep)
    else:
        i0 = np.zeros(net.n)
        i0[0], i0[-1] = 1.0, -1.0
    grid = np.linspace(0.0, args.tmax if args.tmax else 8.0 * rep.psi_nir, args.points)
    traj = simulate.homogeneous_solution(dyn, i0, grid)
    verdict = simulate.verify_envelopes(traj, rep)
    if args.output:
        simulate.trajectory_csv(traj, args.output)
    report = {
        "psi_nir": rep.psi_nir,
        "psi_nrr": rep.psi_nrr,
        "mu": rep.mu,
        "lower_envelope_ok": verdict.lower_ok,
        "upper_envelope_ok": verdict.upper_ok,
        "min_lower_slack": float(np.min(verdict.lower_slack)),
        "min_upper_slack": float(np.min(verdict.upper_slack)),
    }
    sys.stdout.write(json.dumps(report, indent=2) + "\n")
    return 0


def _problem(args, net: PowerNetwork) -> allocate.AllocationProblem:
    lap = build_laplacian(net)
    if args.sources:
        red = kron.kron_reduce_real(lap, _parse_sources(args.sources, net))
        matrix = red.matrix
    else:
        matrix = lap.matrix
    return allocate.AllocationProblem(matrix, args.budget,
                                      r_per_len=net.r_per_len,
                                      l_per_len=net.l_per_len,
                                      omega=net.omega)


def cmd_optimize(args) -> int:
    net = _load(args)
    if args.target_theta is not None:
        sources = _parse_sources(args.sources, net) if args.sources else None
        res = allocate.design_nonuniform(net, args.target_theta, sources=sources)
    else:
        if args.budget is None:
            raise ValidationError("optimize: --budget or --target-theta is required")
        res = allocate.optimize_allocation(_problem(args, net))
    ids = (_parse_sources(args.sources, net) if args.sources else list(net.node_ids()))
    _emit(json.dumps({
        "allocation": {str(i): v for i, v in zip(ids, res.allocation.tolist())},
        "lambda2": res.lam2,
        "psi_nir": res.psi_nir,
        "theta_nir": res.theta_nir,
        "diagnostics": res.diagnostics,
    }, indent=2) + "\n", args)
    return 0


def cmd_landscape(args) -> int:
    net = _load(args)
    prob = _problem(args, net)
    grid = allocate.allocation_landscape(prob, args.resolution)
    ids = (_parse_sources(args.sources, net) if args.sources else list(net.node_ids()))
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow([f"coord_{i}" for i in ids] + ["lambda2"])
    for row in grid:
        w.writerow([repr(float(x)) for x in row])
    _emit(buf.getvalue(), args)
    return 0


def cmd_sweep(args) -> int:
    net = _load(args)
    if args.spacing == "log":
        values = np.geomspace(args.lo_min, args.lo_max, args.steps)
    else:
        values = np.linspace(args.lo_min, args.lo_max, args.steps)
    pairs = None
    buf = io.StringIO()
    w = csv.writer(buf)
    for lo in values:
        swept = net.with_outputs(r_out=0.0, l_out=float(lo))
        rep = measures.psi_nir_uniform(swept)
        red = kron.phasor_reduce(swept)
        records = kron.line_angles(red, swept)
        if pairs is None:
            pairs = [(rec.i, rec.j) for rec in records]
            w.writerow(["l_out", "theta_nir"]
                       + [f"theta_{i}_{j}" for i, j in pairs]
                       + [f"class_{i}_{j}" for i, j in pairs])
        w.writerow([repr(float(lo)), repr(rep.theta_nir)]
                   + [repr(rec.theta_principal_rad) for rec in records]
                   + [rec.klass for rec in records])
    _emit(buf.getvalue(), args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="netinduct",
                                description="Inductivity analysis of lossy RL power networks")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("network", help="network JSON file")
        sp.add_argument("--omega", type=float, help="override frequency (rad/s)")
        sp.add_argument("--lo", type=float, help="uniform output inductance override (H)")
        sp.add_argument("--ro", type=float, help="uniform output resistance override (ohm)")
        sp.add_argument("-o", "--output", help="write result to file instead of stdout")

    sp = sub.add_parser("analyze", help="inductivity/resistivity report")
    common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("kron", help="real or phasor Kron reduction")
    common(sp)
    sp.add_argument("--sources", default="all", help="comma-separated node ids or 'all'")
    sp.add_argument("--phasor", action="store_true", help="emit the phasor angle table (CSV)")
    sp.set_defaults(func=cmd_kron)

    sp = sub.add_parser("simulate", help="homogeneous trajectory and envelope check")
    common(sp)
    sp.add_argument("--worst-case", action="store_true",
                    help="use the slowest-envelope eigenvector as initial condition")
    sp.add_argument("--tmax", type=float, help="simulation horizon (s)")
    sp.add_argument("--points", type=int, default=400)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("optimize", help="output-inductor allocation")
    common(sp)
    sp.add_argument("--budget", type=float, help="total inductance budget (H)")
    sp.add_argument("--target-theta", type=float,
                    help="reach this angle with minimal budget instead")
    sp.add_argument("--sources", help="Kron-reduce to these nodes first")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("landscape", help="lambda2 over the budget simplex (CSV)")
    common(sp)
    sp.add_argument("--budget", type=float, required=True)
    sp.add_argument("--resolution", type=int, required=True)
    sp.add_argument("--sources", help="Kron-reduce to these nodes first")
    sp.set_defaults(func=cmd_landscape)

    sp = sub.add_parser("sweep", help="uniform l_out sweep: theta_nir and line angles (CSV)")
    common(sp)
    sp.add_argument("--lo-min", type=float, required=True)
    sp.add_argument("--lo-max", type=float, required=True)
    sp.add_argument("--steps", type=int, default=20)
    sp.add_argument("--spacing", choices=("log", "linear"), default="log")
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NetinductError, np.linalg.LinAlgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
