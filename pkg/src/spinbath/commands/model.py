"""The build command: a summary of the model a config describes."""

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
from spinbath.lindblad import jump_operators
from spinbath.operators import herm_eig, max_norm
from spinbath.rich import format_value


def build(
    config: ConfigOption = None,
    out: OutOption = None,
    seed: SeedOption = None,
    tol: TolOption = None,
):
    """Build the model and list the H_S spectrum, jump operators and baths."""
    with Spinbath("build") as sb:
        run = sb.load(config, seed, tol)
        model = run.model
        p = model.params
        spectrum = herm_eig(model.hs).eigenvalues
        family = jump_operators(model)

        payload = {
            "n_sites": p.n_sites,
            "b_field": p.b_field,
            "jx": p.jx,
            "jy": p.jy,
            "hs_spectrum": spectrum,
            "hs_hermitian_residual": max_norm(model.hs.data - model.hs.data.conj().T),
            "jump_operators": [
                {"label": j.label, "site": j.site, "coefficient": max_norm(j.operator.data)}
                for j in family
            ],
            "baths": [
                {"site": b.site, "beta": b.beta, "beta0": b.beta0, "beta1": b.beta1}
                for b in model.baths
            ],
        }
        sb.write_report(payload, out)

        from spinbath import console

        baths = Table(header_style=TABLE_HEADER_STYLE, title=f"Baths ({len(model.baths)})")
        for name in ("site", "beta", "beta_0", "beta_1"):
            baths.add_column(name, style=TABLE_COLUMN_STYLE, justify="right")
        for b in model.baths:
            baths.add_row(str(b.site), *(format_value(v) for v in (b.beta, b.beta0, b.beta1)))
        console.print(baths)

        jumps = Table(header_style=TABLE_HEADER_STYLE, title=f"Jump operators ({len(family)})")
        jumps.add_column("label", style=TABLE_COLUMN_STYLE)
        jumps.add_column("coefficient", style=TABLE_VALUE_STYLE, justify="right")
        for j in family:
            jumps.add_row(j.label, format_value(max_norm(j.operator.data)))
        console.print(jumps)

        console.print(
            summary_table(
                "H_S",
                [
                    ("dimension", model.dim),
                    ("lowest energy", float(spectrum[0])),
                    ("highest energy", float(spectrum[-1])),
                ],
            )
        )
