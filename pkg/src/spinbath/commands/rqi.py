"""The rqi-converge command."""

from rich.table import Table

from spinbath.app import Spinbath
from spinbath.commands import (
    TABLE_COLUMN_STYLE,
    TABLE_HEADER_STYLE,
    TABLE_VALUE_STYLE,
    ConfigOption,
    OutOption,
    SeedOption,
    TolOption,
    summary_table,
)
from spinbath.exception import ConfigError, ContractViolation
from spinbath.operators import site_product
from spinbath.rich import format_value
from spinbath.rqi import (
    InteractionSetup,
    convergence_probe,
    effective_hamiltonian,
    gns_blocks,
    shadowing_error,
)

ISOMETRY_TOL = 1e-11


def rqi_converge(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    tol: TolOption = None,
):
    """Residuals of the repeated-interaction difference quotient against the Lindblad generator."""
    with Spinbath("rqi-converge") as sb:
        run = sb.load(config, seed, tol)
        model = run.model
        opts = run.section("rqi")
        x = site_product(opts["observable"], model.n_sites)
        grid = opts["h_grid"]
        if not all(isinstance(h, int | float) and not isinstance(h, bool) for h in grid):
            raise ConfigError(f"analysis.rqi.h_grid must be a list of numbers, got {grid!r}")

        table = convergence_probe(model, x, grid)
        payload: dict = {
            "observable": opts["observable"],
            "rows": [
                {"h": h, "residual": r, "isometry_residual": i}
                for h, r, i in zip(
                    table.h_grid, table.residuals, table.isometry_residuals, strict=True
                )
            ],
            "generator_norm": table.generator_norm,
            "empirical_order": table.empirical_order,
            "strictly_decreasing": table.strictly_decreasing,
            "endpoint_ok": table.endpoint_ok,
            "trivial": table.trivial,
            "passed": table.passed,
        }

        blocks = gns_blocks(InteractionSetup.from_model(model, table.h_grid[-1]))
        shift = effective_hamiltonian(blocks, model)
        payload["effective_hamiltonian"] = shift
        steps = int(opts["shadow_steps"])
        if steps > 0:
            payload["shadowing"] = {
                "steps": steps,
                "h": blocks.h,
                "error": shadowing_error(blocks, model, x, steps),
            }
        sb.write_report(payload, out)

        from spinbath import console

        residuals = Table(header_style=TABLE_HEADER_STYLE, title=f"RQI convergence for {opts['observable']}")
        residuals.add_column("h", style=TABLE_COLUMN_STYLE, justify="right")
        residuals.add_column("residual", style=TABLE_VALUE_STYLE, justify="right")
        residuals.add_column("isometry", style=TABLE_VALUE_STYLE, justify="right")
        for row in payload["rows"]:
            residuals.add_row(*(format_value(row[k]) for k in ("h", "residual", "isometry_residual")))
        console.print(residuals)
        console.print(
            summary_table(
                "Summary",
                [
                    ("generator norm", table.generator_norm),
                    ("empirical order", table.empirical_order),
                    ("scalar shift c", shift.scalar_shift),
                    ("expected c", shift.expected_shift),
                    ("passed", table.passed),
                ],
            )
        )

        if not table.passed:
            raise ContractViolation(
                "Repeated-interaction residuals do not converge: "
                + ", ".join(f"{r:.3g}" for r in table.residuals)
            )
        worst = max(table.isometry_residuals)
        if worst > ISOMETRY_TOL:
            raise ContractViolation(f"Block isometry residual {worst:.3g} exceeds {ISOMETRY_TOL:g}")
