"""The evolve command: a time series of e^{t L*} rho0 towards the stationary state."""

import logging
import math

import numpy as np
from rich.table import Table

from spinbath import Matrix
from spinbath.app import Spinbath
from spinbath.commands import (
    TABLE_COLUMN_STYLE,
    TABLE_HEADER_STYLE,
    ConfigOption,
    OutOption,
    SeedOption,
    TolOption,
)
from spinbath.exception import ConfigError, ContractViolation, UnsupportedModelError
from spinbath.lindblad import EvolveMethod, evolve, propagator
from spinbath.model import LindbladModel, product_gibbs
from spinbath.operators import random_density_matrix, trace_norm, unvec, vec
from spinbath.report import write_csv
from spinbath.rich import format_value
from spinbath.steady import stationary_state
from spinbath.sweep import task_rng
from spinbath.thermo import relative_entropy

TRACE_DRIFT_LIMIT = 1e-8
COLUMNS = ("t", "trace_distance", "relative_entropy", "min_eigenvalue", "trace_drift")


def initial_state(kind: str, model: LindbladModel, seed: int) -> Matrix:
    d = model.dim
    match kind:
        case "random":
            return random_density_matrix(d, task_rng(seed, 0))
        case "maximally-mixed":
            return np.eye(d, dtype=np.complex128) / d
        case "all-up" | "all-down":
            rho = np.zeros((d, d), dtype=np.complex128)
            k = 0 if kind == "all-up" else d - 1
            rho[k, k] = 1
            return rho
    raise ConfigError(
        f"Unknown initial state '{kind}', expected random, maximally-mixed, all-up or all-down"
    )


def _metrics(t: float, rho: Matrix, target: Matrix, reference: Matrix) -> tuple[float, ...]:
    herm = (rho + rho.conj().T) / 2
    trace = float(np.real(np.trace(herm)))
    rel = relative_entropy(herm / trace, reference)
    return (
        t,
        trace_norm(rho - target),
        rel,
        float(np.linalg.eigvalsh(herm)[0]),
        abs(complex(np.trace(rho)) - 1),
    )


def evolve_cmd(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    tol: TolOption = None,
):
    """Evolve an initial state and write t, trace distance, relative entropy, min eigenvalue and trace drift as CSV."""
    with Spinbath("evolve") as sb:
        run = sb.load(config, seed, tol)
        model = run.model
        opts = run.section("evolve")
        try:
            method = EvolveMethod(opts["method"])
        except ValueError as e:
            raise ConfigError(f"Unknown evolve method '{opts['method']}'") from e
        n_steps = int(opts["n_steps"])
        if n_steps < 1 or not opts["t_max"] > 0:
            raise ConfigError("evolve needs t_max > 0 and n_steps >= 1")
        times = np.linspace(0.0, opts["t_max"], n_steps + 1)
        dt = float(times[1] - times[0])

        stationary = stationary_state(model, with_gap=False)
        if stationary.state is None:
            raise UnsupportedModelError(
                f"evolve needs a unique stationary state, the kernel has dimension {stationary.kernel_dimension}"
            )
        target = stationary.state.data
        beta = model.common_beta
        if beta is not None and math.isfinite(beta):
            reference = product_gibbs(beta, model.n_sites).data
        else:
            reference = target

        rho = initial_state(opts["initial"], model, run.seed)
        step = propagator(model, dt) if method == EvolveMethod.EXACT_EXPM else None
        rows = [_metrics(0.0, rho, target, reference)]
        for t in times[1:]:
            if step is not None:
                rho = unvec(step @ vec(rho), model.dim)
            else:
                rho = evolve(model, rho, dt, method, tol=opts["rk_tol"]).data
            rows.append(_metrics(float(t), rho, target, reference))
        logging.info(f"Evolved {n_steps} steps of dt={dt:g} with {method}")

        if out is not None:
            write_csv(out, COLUMNS, rows)

        from spinbath import console

        table = Table(header_style=TABLE_HEADER_STYLE, title=f"Evolution ({len(rows)} samples)")
        for name in COLUMNS:
            table.add_column(name, style=TABLE_COLUMN_STYLE, justify="right")
        for row in (rows[0], rows[len(rows) // 2], rows[-1]):
            table.add_row(*(format_value(v) for v in row))
        console.print(table)

        drift = rows[-1][-1]
        if drift > TRACE_DRIFT_LIMIT:
            raise ContractViolation(f"Final trace drift {drift:.3g} exceeds {TRACE_DRIFT_LIMIT:g}")
