"""Command-line interface: ``ree-css <command> [options]``.

Exit codes: 0 success, 1 domain or input error, 2 verification failure.
Reports go to stdout as JSON (or ``--format text``) and embed the tolerances
used.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .appendix import appendix_suite
from .boundary import (
    Hyperplane,
    PsiWitness,
    boundary_membership,
    gen_boundary_state,
    hyperplane_from_kernel,
    paper_example_sigma,
    pt_kernel,
)
from .css import NATS_TO_BITS, build_family, css_condition_value, family_state, ree_closed
from .errors import DomainError, EigenError, ProjectionError, VerificationError
from .io import load_json, load_matrix, save_json, save_matrix
from .linalg import RANK_TOL, eigvalsh, partial_transpose, trace_inner
from .oracle import OracleConfig, css_numeric, rel_entropy

EXIT_OK, EXIT_DOMAIN, EXIT_VERIFY = 0, 1, 2

#: CSS optimality check: allowed excess of the product-state maximum over 1.
CONDITION_TOL = 1e-7
#: Allowed deviation of ``Tr(sigma L_sigma(rho))`` from 1.
ANCHOR_TOL = 1e-9


class VerificationFailed(Exception):
    """Raised by a command whose check did not pass; carries the report."""

    def __init__(self, report):
        super().__init__(report.get("reason", "verification failed"))
        self.report = report


def _units(value, bits):
    return float(value * NATS_TO_BITS if bits else value)


def _parse_coeffs(path):
    obj = load_json(path)
    if isinstance(obj, dict):
        if "re" not in obj:
            raise DomainError(f"{path}: coefficient object needs 're' (and optionally 'im')")
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise DomainError(f"{path}: 're' and 'im' lengths differ")
        return re + 1j * im
    try:
        return np.asarray(obj, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{path}: coefficients must be a list of numbers or {{re, im}}") from exc


def cmd_example_sigma(args):
    sigma = paper_example_sigma()
    if args.out:
        save_matrix(args.out, sigma, (2, 3))
    vals = eigvalsh(sigma)
    return {"dims": [2, 3], "trace": float(np.trace(sigma).real), "lambda_min": float(vals[-1]), "out": args.out}


def cmd_gen_boundary(args):
    sigma = gen_boundary_state(args.m, args.k, seed=args.seed)
    dims = (2, args.m)
    if args.out:
        save_matrix(args.out, sigma, dims)
    pt = eigvalsh(partial_transpose(sigma, dims))
    return {
        "m": args.m,
        "k": args.k,
        "seed": args.seed,
        "dims": list(dims),
        "lambda_min": float(eigvalsh(sigma)[-1]),
        "pt_eigenvalues": pt.tolist(),
        "membership": boundary_membership(sigma, dims),
        "tolerances": {"rank": RANK_TOL},
        "out": args.out,
    }


def cmd_hyperplane(args):
    sigma, dims = load_matrix(args.sigma)
    parties = tuple(args.parties)
    basis = pt_kernel(sigma, dims, parties, args.tol)
    coeffs = _parse_coeffs(args.coeffs) if args.coeffs else None
    h = hyperplane_from_kernel(sigma, dims, coeffs, parties, args.tol)
    if args.out:
        save_matrix(args.out, h.phi, dims)
    return {
        "kernel_dimension": int(basis.shape[1]),
        "coefficients": {"re": h.kernel_coeffs.real.tolist(), "im": h.kernel_coeffs.imag.tolist()},
        "tr_phi_sigma": trace_inner(h.phi, sigma),
        "tr_phi_squared": trace_inner(h.phi, h.phi),
        "parties": list(parties),
        "tolerances": {"rank": args.tol},
        "out": args.out,
    }


def cmd_inverse_css(args):
    sigma, dims = load_matrix(args.sigma)
    parties = tuple(args.parties)
    if args.psi:
        psi, psi_dims = load_matrix(args.psi)
        witness = PsiWitness(psi, sigma, psi_dims, parties)
    else:
        phi, phi_dims = load_matrix(args.phi)
        witness = Hyperplane(phi, sigma, phi_dims, parties)
    if witness.dims != dims:
        raise DomainError(f"witness dims {list(witness.dims)} differ from sigma dims {list(dims)}")
    fam = build_family(sigma, witness, dims)
    x = args.x if args.x is not None else args.x_frac * fam.x_max
    if x == 0 and not args.allow_endpoint:
        raise DomainError("x must exceed 0 for an entangled output (pass --allow-endpoint to return sigma)")
    rho = family_state(fam, x)
    if args.out:
        save_matrix(args.out, rho, dims)
    report = {
        "branch": "singular" if fam.singular else "full-rank",
        "x": float(x),
        "x_max": float(fam.x_max),
        "lambda_min_rho": float(eigvalsh(rho)[-1]),
        "lambda_min_rho_pt": float(eigvalsh(partial_transpose(rho, dims, parties))[-1]),
        "out": args.out,
    }
    if x > 0:
        e = ree_closed(fam, x)
        report.update({"ree_nats": float(e), "ree_bits": _units(e, True)})
    return report


def cmd_ree(args):
    rho, dims = load_matrix(args.rho)
    sigma, sdims = load_matrix(args.sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"dimension mismatch: rho {rho.shape} vs sigma {sigma.shape}")
    value = rel_entropy(rho, sigma)
    return {
        "ree": _units(value, args.bits) if np.isfinite(value) else "inf",
        "units": "bits" if args.bits else "nats",
    }


def cmd_verify_css(args):
    rho, dims = load_matrix(args.rho)
    sigma, _ = load_matrix(args.sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"dimension mismatch: rho {rho.shape} vs sigma {sigma.shape}")
    value, at_sigma = css_condition_value(rho, sigma, dims, tuple(args.parties), args.restarts, args.seed)
    ok = value <= 1.0 + args.tol and abs(at_sigma - 1.0) <= ANCHOR_TOL
    report = {
        "passed": bool(ok),
        "max_product_value": float(value),
        "tr_sigma_L_rho": float(at_sigma),
        "restarts": args.restarts,
        "tolerances": {"condition": args.tol, "anchor": ANCHOR_TOL},
    }
    if not ok:
        report["reason"] = "sigma fails the closest-PPT-state condition for rho"
        raise VerificationFailed(report)
    return report


def cmd_oracle_css(args):
    rho, dims = load_matrix(args.rho)
    cfg = OracleConfig(max_iters=args.max_iters, tol_step=args.tol_step, restarts=args.restarts, seed=args.seed)
    res = css_numeric(rho, dims, tuple(args.parties), cfg)
    if args.out:
        save_matrix(args.out, res.minimizer, dims)
    report = {
        "converged": bool(res.converged),
        "objective": _units(res.objective, args.bits),
        "units": "bits" if args.bits else "nats",
        "iterations": int(res.iterations),
        "grad_residual": float(res.grad_residual),
        "restart_objectives": [_units(v, args.bits) for v in res.restart_objectives],
        "membership": boundary_membership(res.minimizer, dims, tuple(args.parties)),
        "tolerances": {"tol_step": cfg.tol_step, "rank": RANK_TOL},
        "out": args.out,
    }
    if args.report:
        save_json(args.report, report)
    if not res.converged:
        report["reason"] = f"oracle did not converge within {cfg.max_iters} iterations"
        raise VerificationFailed(report)
    return report


def cmd_appendix_suite(args):
    report = appendix_suite(args.samples, args.n, args.seed)
    if args.report:
        save_json(args.report, report)
    if not report["passed"]:
        report["reason"] = f"{report['violations']} property violations"
        raise VerificationFailed(report)
    # counterexample lists are empty on success; keep stdout short
    for entry in report["properties"].values():
        entry.pop("counterexamples")
    return report


def _nonneg_fraction(text):
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError("must lie in [0, 1]")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="ree-css", description="Inverse closest-PPT-state toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=("json", "text"), default="json", help="report format on stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    def party_arg(p):
        p.add_argument("--parties", type=int, nargs="+", default=[1], help="1-based parties to transpose")

    p = sub.add_parser("example-sigma", help="write the 6x6 qubit-qutrit boundary state")
    p.add_argument("--out")
    p.set_defaults(func=cmd_example_sigma)

    p = sub.add_parser("gen-boundary", help="random full-rank boundary state with a k-dimensional PT kernel")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen_boundary)

    p = sub.add_parser("hyperplane", help="supporting hyperplane from the kernel of sigma^Gamma")
    p.add_argument("--sigma", required=True)
    p.add_argument("--coeffs", help="JSON list (or {re, im}) of kernel coefficients")
    p.add_argument("--tol", type=float, default=RANK_TOL)
    p.add_argument("--out")
    party_arg(p)
    p.set_defaults(func=cmd_hyperplane)

    p = sub.add_parser("inverse-css", help="entangled state whose closest PPT state is sigma")
    p.add_argument("--sigma", required=True)
    wit = p.add_mutually_exclusive_group(required=True)
    wit.add_argument("--phi", help="supporting hyperplane matrix")
    wit.add_argument("--psi", help="singular-branch witness matrix")
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--x", type=float)
    where.add_argument("--x-frac", type=_nonneg_fraction, help="x as a fraction of x_max")
    p.add_argument("--allow-endpoint", action="store_true", help="accept x = 0 (returns sigma)")
    p.add_argument("--out")
    party_arg(p)
    p.set_defaults(func=cmd_inverse_css)

    p = sub.add_parser("ree", help="relative entropy S(rho || sigma)")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--bits", action="store_true", help="report in bits instead of nats")
    p.set_defaults(func=cmd_ree)

    p = sub.add_parser("verify-css", help="check the optimality condition for sigma as CSS of rho")
    p.add_argument("--rho", required=True)
    p.add_argument("--sigma", required=True)
    p.add_argument("--restarts", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=CONDITION_TOL)
    party_arg(p)
    p.set_defaults(func=cmd_verify_css)

    p = sub.add_parser("oracle-css", help="numerical closest PPT state")
    p.add_argument("--rho", required=True)
    p.add_argument("--restarts", type=_positive_int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=_positive_int, default=OracleConfig.max_iters)
    p.add_argument("--tol-step", type=float, default=OracleConfig.tol_step)
    p.add_argument("--bits", action="store_true", help="report the objective in bits")
    p.add_argument("--out")
    p.add_argument("--report")
    party_arg(p)
    p.set_defaults(func=cmd_oracle_css)

    p = sub.add_parser("appendix-suite", help="concavity property suite")
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--report")
    p.set_defaults(func=cmd_appendix_suite)
    return parser


def _emit(report, fmt, stream):
    if fmt == "json":
        print(json.dumps(report, indent=2), file=stream)
    else:
        for key, value in report.items():
            print(f"{key}: {value}", file=stream)


def run(argv=None):
    """Parse `argv`, execute the command and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors; that code is reserved here
        return EXIT_OK if exc.code in (0, None) else EXIT_DOMAIN
    try:
        report = args.func(args)
    except VerificationFailed as exc:
        _emit(exc.report, args.format, sys.stdout)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (VerificationError, ProjectionError) as exc:
        print(f"error: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (DomainError, EigenError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(report, args.format, sys.stdout)
    return EXIT_OK


def main():
    sys.exit(run())
