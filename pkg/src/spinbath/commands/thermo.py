"""The entropy and detailed-balance commands."""

import logging
import math

from rich.markup import escape
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
    summary_table,
)
from spinbath.config import RunConfig
from spinbath.exception import ConfigError, ContractViolation, UnsupportedModelError
from spinbath.model import product_gibbs
from spinbath.operators import random_density_matrix
from spinbath.rich import format_value
from spinbath.steady import stationary_state
from spinbath.sweep import parallel_map, task_rng
from spinbath.thermo import (
    detailed_balance_certificate,
    entropy_production_closed,
    entropy_production_def,
)

NEGATIVITY_SLACK = 1e-10


def _reference_state(run: RunConfig, choice: str) -> tuple[Matrix, str]:
    """The state entropy is measured against: product Gibbs at a common beta, or the kernel state."""
    model = run.model
    beta = model.common_beta
    equal_finite = beta is not None and math.isfinite(beta)
    if choice not in ("auto", "product-gibbs", "stationary"):
        raise ConfigError(f"Unknown reference state '{choice}', expected auto, product-gibbs or stationary")
    if choice == "product-gibbs" or (choice == "auto" and equal_finite):
        if not equal_finite:
            raise UnsupportedModelError("The product Gibbs reference needs every bath at one finite beta")
        assert beta is not None
        return product_gibbs(beta, model.n_sites).data, "product-gibbs"
    report = stationary_state(model, with_gap=False)
    if report.state is None:
        raise UnsupportedModelError(
            f"The stationary state is not unique (kernel dimension {report.kernel_dimension})"
        )
    return report.state.data, "stationary"


def entropy(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    tol: TolOption = None,
):
    """Entropy production on the reference state and on seeded random faithful states."""
    with Spinbath("entropy") as sb:
        run = sb.load(config, seed, tol)
        model = run.model
        opts = run.section("entropy")
        reference, ref_kind = _reference_state(run, opts["reference"])
        closed = ref_kind == "product-gibbs" and model.params.is_isotropic
        if not closed:
            logging.info("No closed form for this model: only the definition is evaluated")

        def evaluate(index: int) -> dict:
            # task 0 is the reference state itself, tasks 1.. are random states
            rho = reference if index == 0 else random_density_matrix(model.dim, task_rng(run.seed, index))
            by_def = entropy_production_def(model, rho, reference, tol=run.tol)
            row = {
                "index": index,
                "sigma_def": by_def.sigma_total,
                "per_bath": by_def.per_bath,
                "hamiltonian_part": by_def.hamiltonian_part,
                "additivity_residual": by_def.additivity_residual,
            }
            if closed:
                row["sigma_closed"] = entropy_production_closed(model, rho).sigma_total
            return row

        rows = parallel_map(evaluate, range(int(opts["n_states"]) + 1))
        sigmas = [r["sigma_def"] for r in rows]
        payload: dict = {
            "reference": ref_kind,
            # unequal temperatures measured against the kernel state go beyond the equal-beta theory
            "extension": ref_kind == "stationary",
            "sigma_at_reference": rows[0]["sigma_def"],
            "min_sigma": min(sigmas),
            "max_additivity_residual": max(r["additivity_residual"] for r in rows),
            "states": rows,
        }
        if closed:
            payload["max_closed_form_difference"] = max(
                abs(r["sigma_def"] - r["sigma_closed"]) for r in rows
            )
        sb.write_report(payload, out)

        from spinbath import console

        console.print(
            summary_table(
                f"Entropy production ({len(rows) - 1} random states, reference {ref_kind})",
                [(k, v) for k, v in payload.items() if k != "states"],
            )
        )

        if payload["min_sigma"] < -NEGATIVITY_SLACK:
            raise ContractViolation(f"Negative entropy production {payload['min_sigma']:.3g}")
        if closed and payload["max_closed_form_difference"] > run.tol:
            raise ContractViolation(
                "Definition and closed form disagree by "
                f"{payload['max_closed_form_difference']:.3g} (tolerance {run.tol:g})"
            )


def detailed_balance(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    tol: TolOption = None,
):
    """Check [H_S, rho] = 0 and rho-weighted self-adjointness of the dissipator."""
    with Spinbath("detailed-balance") as sb:
        run = sb.load(config, seed, tol)
        state, kind = _reference_state(run, run.section("detailed_balance")["state"])
        report = detailed_balance_certificate(run.model, state, threshold=run.tol, seed=run.seed)
        payload = {"state": kind, "certificate": report}
        sb.write_report(payload, out)

        from spinbath import console

        table = Table(header_style=TABLE_HEADER_STYLE, title=f"Detailed balance at the {kind} state")
        table.add_column("Quantity", style=TABLE_COLUMN_STYLE)
        table.add_column("Value", justify="right")
        table.add_row(escape("[H_S, rho]"), format_value(report.commutation_residual))
        table.add_row("symmetry residual", format_value(report.symmetry_residual))
        table.add_row("pairs checked", f"{report.pairs_checked} ({'all' if report.exhaustive else 'sampled'})")
        table.add_row("satisfied", "[green]yes[/green]" if report.satisfied else "[red]no[/red]")
        console.print(table)
