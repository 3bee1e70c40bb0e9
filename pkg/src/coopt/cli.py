"""Command-line surface.

Subcommands: solve (fixed-point iteration on a problem file), sweep (alpha
grid with seeded restarts, CSV report), quantum (stationary states of a
Hamiltonian file), nash (exhaustive pure-equilibrium enumeration) and
verify (epsilon certificate for a provided profile).

Exit codes: 0 success, 2 clean non-convergence (results still written),
1 malformed input or validation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import replace

import numpy as np

from . import continuous, discrete, equilibrium, fileio
from .continuous import EvolutionError, lowest_states
from .discrete import AllZeroReturnsError, DivergenceError
from .model import ValidationError, to_utility_model, validate
from .rng import random_unit_vector

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_NOT_CONVERGED = 2


def parse_alpha_grid(text: str) -> list[float]:
    """Grid spec 'a:b:log:N' or 'a:b:lin:N' (N values from a to b)."""
    parts = text.split(":")
    if len(parts) != 4 or parts[2] not in ("log", "lin"):
        raise ValueError("--alpha-grid must look like 'a:b:log:N' or 'a:b:lin:N'")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[3])
    except ValueError:
        raise ValueError("--alpha-grid bounds must be numbers and N an integer") from None
    if n < 1:
        raise ValueError("--alpha-grid needs N >= 1")
    if parts[2] == "log":
        if lo <= 0 or hi <= 0:
            raise ValueError("--alpha-grid log spacing needs positive bounds")
        return [float(x) for x in np.geomspace(lo, hi, n)]
    return [float(x) for x in np.linspace(lo, hi, n)]


def _load_model(args):
    model = fileio.load_problem(args.problem)
    if getattr(args, "hbar", None) is not None:
        model = validate(replace(model, hbar=args.hbar))
    return model


def _initial_profile(model, args):
    if args.init == "random":
        return discrete.random_profile(model, args.seed)
    return None  # iterate defaults to uniform


def _cmd_solve(args) -> int:
    model = _load_model(args)
    result = discrete.iterate_to_fixed_point(
        model,
        args.alpha,
        _initial_profile(model, args),
        tol=args.tol,
        max_iter=args.max_iter,
        keep_trace=args.trace is not None,
    )
    certificate = (
        equilibrium.epsilon_of_profile(model, result.profile)
        if model.mode == "utility"
        else None
    )
    fileio.write_document(
        fileio.solve_document(model, args.alpha, result, certificate), args.out
    )
    if args.trace is not None:
        result.trace.write_csv(args.trace)
    return EXIT_OK if result.converged else EXIT_NOT_CONVERGED


def _cmd_sweep(args) -> int:
    model = _load_model(args)
    grid = parse_alpha_grid(args.alpha_grid)
    report = equilibrium.alpha_sweep(
        model,
        grid,
        restarts=args.restarts,
        base_seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter,
    )
    text = report.to_csv()
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as f:
            f.write(text)
    all_converged = all(row.converged for row in report.rows)
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def _cmd_quantum(args) -> int:
    operator = fileio.load_hamiltonian(args.hamiltonian)
    n = operator.dimension
    if args.init == "random":
        psi0 = random_unit_vector(n, args.seed)
    else:
        psi0 = np.full(n, 1.0 / math.sqrt(n))
    dt = args.dt if args.dt is not None else continuous.default_step(operator, args.hbar)
    results = lowest_states(
        operator,
        args.states,
        psi0,
        dt=dt,
        t_max=args.t_max,
        tol=args.tol,
        hbar=args.hbar,
        seed=args.seed,
    )
    entries = [
        fileio.quantum_state_entry(k, report, psi)
        for k, (_, report, psi) in enumerate(results)
    ]
    fileio.write_document(
        fileio.quantum_document(entries, dt=dt, tol=args.tol, hbar=args.hbar), args.out
    )
    if args.trace is not None:
        continuous.write_trajectory_csv(
            args.trace,
            ((points, [str(k)]) for k, (points, _, _) in enumerate(results)),
        )
    all_converged = all(report.converged for _, report, _ in results)
    return EXIT_OK if all_converged else EXIT_NOT_CONVERGED


def _cmd_nash(args) -> int:
    model = to_utility_model(_load_model(args))
    equilibria = equilibrium.enumerate_pure_nash(model)
    fileio.write_document(fileio.nash_document(model, equilibria), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    model = to_utility_model(_load_model(args))
    profile = fileio.load_profile(args.profile, model)
    certificate = equilibrium.epsilon_of_profile(model, profile)
    fileio.write_document(fileio.verify_document(model, certificate), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopt",
        description="Compromise dynamics for games and energies, with "
        "stationary-state and equilibrium certification tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_iteration(p):
        p.add_argument("--problem", required=True, help="problem JSON file")
        p.add_argument("--hbar", type=float, default=None, help="override the model's hbar")
        p.add_argument("--tol", type=float, default=discrete.DEFAULT_TOL)
        p.add_argument("--max-iter", type=int, default=discrete.DEFAULT_MAX_ITER)

    p = sub.add_parser("solve", help="iterate to a fixed point and certify it")
    common_iteration(p)
    p.add_argument("--alpha", type=float, required=True, help="compromise exponent")
    p.add_argument("--init", choices=("uniform", "random"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="result JSON (stdout when omitted)")
    p.add_argument("--trace", default=None, help="per-step max-change CSV")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="alpha grid with seeded restarts, CSV report")
    common_iteration(p)
    p.add_argument("--alpha-grid", required=True, help="a:b:log:N or a:b:lin:N")
    p.add_argument("--restarts", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="base seed for restart cells")
    p.add_argument("--out", default=None, help="report CSV (stdout when omitted)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("quantum", help="stationary states of a Hamiltonian file")
    p.add_argument("--hamiltonian", required=True, help="Hamiltonian JSON file")
    p.add_argument("--dt", type=float, default=None, help="integrator step")
    p.add_argument("--t-max", type=float, default=continuous.DEFAULT_T_MAX)
    p.add_argument("--tol", type=float, default=continuous.DEFAULT_STATIONARY_TOL)
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--states", type=int, default=1, help="number of lowest states")
    p.add_argument("--init", choices=("uniform", "random"), default="uniform")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="report JSON (stdout when omitted)")
    p.add_argument("--trace", default=None, help="trajectory CSV")
    p.set_defaults(func=_cmd_quantum)

    p = sub.add_parser("nash", help="enumerate pure equilibria exhaustively")
    p.add_argument("--problem", required=True)
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_nash)

    p = sub.add_parser("verify", help="epsilon certificate for a profile file")
    p.add_argument("--problem", required=True)
    p.add_argument("--profile", required=True, help="profile JSON file")
    p.add_argument("--hbar", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        fileio.FileFormatError,
        ValidationError,
        equilibrium.EnumerationTooLargeError,
        ValueError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (DivergenceError, AllZeroReturnsError, EvolutionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
