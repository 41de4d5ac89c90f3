import logging
from typing import Annotated

import typer

import spinbath

from . import console
from .commands import dynamics, model, rqi, steady, thermo

app = typer.Typer(
    rich_markup_mode="rich",
    help="spinbath - Lindblad XY spin chains coupled to heat baths.\n\n"
    "Every analysis command reads a run configuration (--config) and can write a report (--out).",
)
app.command("build")(model.build)
app.command("evolve")(dynamics.evolve_cmd)
app.command("stationary")(steady.stationary)
app.command("entropy")(thermo.entropy)
app.command("detailed-balance")(thermo.detailed_balance)
app.command("local-states")(steady.local_states)
app.command("rqi-converge")(rqi.rqi_converge)


@app.callback(invoke_without_command=True)
def main_callback(
    ctx: typer.Context,
    debug: Annotated[
        bool,
        typer.Option(
            "--debug",
            help="Enable debug logging output.",
        ),
    ] = False,
    no_timing: Annotated[
        bool,
        typer.Option(
            "--no-timing",
            help="Leave wall_time_s out of reports so repeated runs are byte-identical.",
        ),
    ] = False,
):
    """Main callback for the spinbath application."""
    # Set the log level based on --debug flag
    if debug:
        spinbath.log_filter_level = logging.DEBUG
    if no_timing:
        spinbath.omit_timing = True

    if ctx.invoked_subcommand is None:
        # No command provided, show help
        console.print(ctx.get_help())
        raise typer.Exit()


if __name__ == "__main__":
    app()
