#!/usr/bin/env python3
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import click
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from contact_lattice import __version__
from contact_lattice.cli.config_loader import load_spec_document, load_system_config
from contact_lattice.cli.live_row_formatter import format_row, render_cell
from contact_lattice.cli.schema_validator import spec_errors, validate_spec
from contact_lattice.core.exceptions import SpecValidationError
from contact_lattice.harness.runner import (
    EXIT_INVALID_SPEC, EXIT_OK, EXIT_RUNTIME_FAILURE, RunResult, run_experiment,
)
from contact_lattice.harness.spec import parse_spec, spec_hash

MAX_TABLE_ROWS = 40

logger = logging.getLogger("contact_lattice.cli")


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False)],
        force=True,
    )


def _report_error(payload: Dict[str, Any]) -> None:
    click.echo(json.dumps(payload, sort_keys=True), err=True)


def _render_table(title: str, rows: Sequence[Dict[str, Any]], columns: Optional[List[str]] = None) -> None:
    if not rows:
        return
    columns = columns or list(rows[0].keys())
    table = Table(title=title, show_lines=False)
    for col in columns:
        table.add_column(col)
    for row in rows[:MAX_TABLE_ROWS]:
        table.add_row(*(render_cell(col, row.get(col)) for col in columns))
    console = Console()
    console.print(table)
    if len(rows) > MAX_TABLE_ROWS:
        console.print(f"... {len(rows) - MAX_TABLE_ROWS} more row(s) in the CSV output")
        for row in rows[MAX_TABLE_ROWS:]:
            logger.debug(format_row(row, columns))


def _finish(ctx: click.Context, result: RunResult, title: str,
            columns: Optional[List[str]] = None) -> None:
    if result.error is not None:
        _report_error(result.error)
    if result.outcome is not None:
        _render_table(title, result.outcome.table, columns)
    for path in result.artifacts:
        click.echo(f"wrote {path}")
    ctx.exit(result.exit_code)


@click.group()
@click.version_option(__version__)
@click.option("--config", "-c", default="./config.yaml", help="Path to system config (defaults if missing)")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging")
@click.pass_context
def cli(ctx: click.Context, config: str, verbose: bool) -> None:
    """contact-lattice - three-state contact process experiments."""
    ctx.ensure_object(dict)
    try:
        defaults = load_system_config(config)
    except Exception as e:
        _report_error({"error": "invalid_config", "message": str(e)})
        ctx.exit(EXIT_INVALID_SPEC)
    ctx.obj["defaults"] = defaults
    _configure_logging("DEBUG" if verbose else defaults.logging_level)


@cli.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--seed", type=int, default=None, help="Override master_seed")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Override the output directory")
@click.pass_context
def run(ctx: click.Context, spec_path: str, seed: Optional[int], out: Optional[str]) -> None:
    """Run the experiment described by SPEC_PATH."""
    try:
        document = load_spec_document(spec_path)
        result = run_experiment(document, seed, out, ctx.obj["defaults"])
    except SpecValidationError as e:
        _report_error(e.to_dict())
        ctx.exit(EXIT_INVALID_SPEC)
    except Exception as e:
        logger.exception("Unexpected failure")
        _report_error({"error": type(e).__name__, "message": str(e)})
        ctx.exit(EXIT_RUNTIME_FAILURE)
    _finish(ctx, result, document.get("experiment", "results"))


@cli.command()
@click.argument("spec_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def validate(ctx: click.Context, spec_path: str) -> None:
    """Check SPEC_PATH without running it."""
    try:
        document = load_spec_document(spec_path)
    except SpecValidationError as e:
        _report_error(e.to_dict())
        ctx.exit(EXIT_INVALID_SPEC)
    errors = validate_spec(document)
    if errors:
        for line in errors:
            logger.error(line)
        _report_error({"error": "invalid_spec", "details": spec_errors(document)})
        ctx.exit(EXIT_INVALID_SPEC)
    spec = parse_spec(document)
    for warning in spec.positivity_warnings():
        logger.warning(warning)
    click.echo(f"valid {spec.experiment} spec {spec_hash(spec)}")
    ctx.exit(EXIT_OK)


@cli.command("oracle-check")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Output directory")
@click.option("--seed", type=int, default=0, help="Seed for the random rate sets")
@click.pass_context
def oracle_check(ctx: click.Context, out: Optional[str], seed: int) -> None:
    """Run every exact-oracle invariant and print a pass/fail table."""
    defaults = ctx.obj["defaults"]
    document = {"experiment": "oracle_check", "master_seed": seed,
                "outputs": {"dir": out or defaults.output_dir}}
    try:
        result = run_experiment(document, defaults=defaults)
    except Exception as e:
        logger.exception("Unexpected failure")
        _report_error({"error": type(e).__name__, "message": str(e)})
        ctx.exit(EXIT_RUNTIME_FAILURE)
    _finish(ctx, result, "exact oracle", ["name", "value", "threshold", "status"])


def main() -> Optional[int]:
    """Entry point for the contact-lattice CLI."""
    try:
        return cli(standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Operation aborted.", err=True)
        return EXIT_RUNTIME_FAILURE
    except click.exceptions.ClickException as e:
        e.show()
        return EXIT_RUNTIME_FAILURE
    except Exception as e:
        _report_error({"error": type(e).__name__, "message": str(e)})
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    sys.exit(main())
