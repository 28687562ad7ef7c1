"""
Command line interface.

Commands:
  complex   list the associated and lower-associated complexes
  persist   persistence diagram of one homology variant
  distance  hypergraph distance between two filtrations of one hypergraph
  morphism  diagram triples of the persistent maps induced by a morphism
  evolve    snapshot diagrams and map distances along an evolution log

Exit codes: 0 success, 1 validation error, 2 parse error.
"""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor

import click

from . import config
from .errors import HyperpersistError, ParseError
from .fieldlin import PrimeField
from .formats import (
    csv_text,
    format_value,
    load_evolution,
    load_hypergraph,
    load_morphism,
    snapshot_inclusion,
)
from .hypercore import associated_complex, lower_associated_complex
from .metric import hypergraph_distance, map_distance
from .persist import (
    ARROWS,
    DIRECTIONS,
    SURFACED_ARROWS,
    build_persistence_module,
    commutative_diagram_triples,
    module_diagram,
)

log = logging.getLogger("hyperpersist.cli")

# Command-line variant names
VARIANT_NAMES = {"embedded": "embedded", "delta": "delta_upper", "lower": "delta_lower"}

INPUT_FILE = click.Path(exists=True, dir_okay=False)

DIAGRAM_HEADER = ("snapshot", "dim", "birth", "death")
DISTANCE_HEADER = ("from", "to", "arrow", "distance")


def _fail(message, code):
    click.secho(f"Error: {message}", fg="red", err=True)
    sys.exit(code)


def _guarded(action):
    """Run ``action`` and turn library errors into exit codes."""
    try:
        return action()
    except ParseError as exc:
        _fail(str(exc), 2)
    except (HyperpersistError, ValueError) as exc:
        _fail(str(exc), 1)


def _diagram_rows(diagram, *prefix):
    return [(*prefix, b, d) for b, d in diagram.points]


def _field_option(func):
    return click.option(
        "--field", "field_p", type=int, default=config.HYPERPERSIST_FIELD, show_default=True,
        help="Prime modulus of the coefficient field.",
    )(func)


def _dim_option(func):
    return click.option("--dim", type=int, default=1, show_default=True, help="Homology degree.")(func)


def _p_option(func):
    return click.option(
        "--p", "order", type=float, default=float("inf"), show_default="inf",
        help="Bottleneck order, a real >= 1 or inf.",
    )(func)


def _variant_option(func):
    return click.option(
        "--variant", type=click.Choice(list(VARIANT_NAMES)), default="embedded", show_default=True,
        help="embedded homology, associated complex (delta) or lower-associated complex (lower).",
    )(func)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Log debug output to stderr.")
def cli(verbose):
    """Persistent homology for filtered hypergraphs."""
    config.setup_logging(verbose)


@cli.command("complex")
@click.argument("input_path", metavar="INPUT", type=INPUT_FILE)
def cmd_complex(input_path):
    """List the associated and lower-associated complexes of INPUT."""

    def action():
        base = load_hypergraph(input_path).base
        complexes = (("delta", associated_complex(base)), ("lower", lower_associated_complex(base)))
        counts = []
        listing = []
        for name, k in complexes:
            by_dim = {}
            for edge in k.sorted_edges():
                by_dim[len(edge) - 1] = by_dim.get(len(edge) - 1, 0) + 1
                listing.append((name, len(edge) - 1, " ".join(k.names(edge))))
            counts.extend((name, n, c) for n, c in sorted(by_dim.items()))
            log.info("%s complex: %d simplices", name, len(k))
        click.echo(csv_text(("complex", "dim", "count"), counts), nl=False)
        click.echo()
        click.echo(csv_text(("complex", "dim", "simplex"), listing), nl=False)

    _guarded(action)


@cli.command("persist")
@click.argument("input_path", metavar="INPUT", type=INPUT_FILE)
@_variant_option
@_dim_option
@_field_option
def cmd_persist(input_path, variant, dim, field_p):
    """Persistence diagram of INPUT as CSV (dim, birth, death)."""

    def action():
        field = PrimeField(field_p)
        f = load_hypergraph(input_path)
        diagram = module_diagram(build_persistence_module(f, VARIANT_NAMES[variant], dim, field))
        click.echo(csv_text(("dim", "birth", "death"), _diagram_rows(diagram, dim)), nl=False)

    _guarded(action)


@cli.command("distance")
@click.argument("first", type=INPUT_FILE)
@click.argument("second", type=INPUT_FILE)
@_dim_option
@_p_option
@_field_option
def cmd_distance(first, second, dim, order, field_p):
    """Hypergraph distance between two filtrations of the same hypergraph."""

    def action():
        field = PrimeField(field_p)
        f, g = load_hypergraph(first), load_hypergraph(second)
        click.echo(format_value(hypergraph_distance(f, g, dim, order, field)))

    _guarded(action)


@cli.command("morphism")
@click.argument("domain_path", metavar="DOMAIN", type=INPUT_FILE)
@click.argument("codomain_path", metavar="CODOMAIN", type=INPUT_FILE)
@click.argument("map_path", metavar="MAP", type=INPUT_FILE)
@click.option(
    "--direction", type=click.Choice(DIRECTIONS), default="pushforward", show_default=True,
    help="pushforward uses the DOMAIN weights, pullback the CODOMAIN weights.",
)
@click.option(
    "--arrow", "arrows", multiple=True, type=click.Choice(list(ARROWS)),
    help="Arrow to report; repeatable. Defaults to the row maps and the Inf-to-Sup inclusions.",
)
@_dim_option
@_field_option
def cmd_morphism(domain_path, codomain_path, map_path, direction, arrows, dim, field_p):
    """Diagram triples of the persistent maps induced by MAP, as CSV."""

    def action():
        field = PrimeField(field_p)
        f_domain = load_hypergraph(domain_path)
        f_codomain = load_hypergraph(codomain_path)
        phi = load_morphism(map_path, f_domain.base, f_codomain.base)
        filtration = f_domain if direction == "pushforward" else f_codomain
        names = arrows or SURFACED_ARROWS
        triples = commutative_diagram_triples(phi, filtration, direction, dim, field, names)
        rows = []
        for name in names:
            for component, diagram in triples[name].components().items():
                rows.extend(_diagram_rows(diagram, name, component))
        click.echo(csv_text(("arrow", "component", "birth", "death"), rows), nl=False)

    _guarded(action)


def _pair_report(earlier, later, dim, order, field):
    phi = snapshot_inclusion(earlier, later)
    pulled = commutative_diagram_triples(
        phi, later.filtration, "pullback", dim, field, SURFACED_ARROWS
    )
    pushed = commutative_diagram_triples(
        phi, earlier.filtration, "pushforward", dim, field, SURFACED_ARROWS
    )
    log.debug("Compared snapshots %s and %s", earlier.timestamp, later.timestamp)
    return [
        (earlier.timestamp, later.timestamp, name, map_distance(pulled[name], pushed[name], order))
        for name in SURFACED_ARROWS
    ]


@cli.command("evolve")
@click.argument("log_dir", metavar="LOG", type=click.Path(exists=True, file_okay=False))
@_variant_option
@_dim_option
@_p_option
@_field_option
@click.option("--workers", type=int, default=None, help="Concurrent snapshot pairs [default: CPU count].")
def cmd_evolve(log_dir, variant, dim, order, field_p, workers):
    """One report block per consecutive snapshot pair in LOG.

    Each block lists the diagrams of both snapshots, then for every surfaced
    arrow the map distance between the pull-back construction (later
    snapshot's weights pulled back along the inclusion) and the push-forward
    construction (earlier snapshot's weights pushed forward). A log with a
    single snapshot prints its diagram only.
    """

    def action():
        field = PrimeField(field_p)
        snapshots = load_evolution(log_dir)
        diagrams = {}
        for snap in snapshots:
            module = build_persistence_module(snap.filtration, VARIANT_NAMES[variant], dim, field)
            diagrams[snap.timestamp] = _diagram_rows(module_diagram(module), snap.timestamp, dim)

        pairs = list(zip(snapshots, snapshots[1:]))
        if not pairs:
            rows = [row for snap in snapshots for row in diagrams[snap.timestamp]]
            click.echo(csv_text(DIAGRAM_HEADER, rows), nl=False)
            return
        count = workers or config.default_workers()
        log.info("Scheduling %d snapshot pairs on %d workers", len(pairs), count)
        with ThreadPoolExecutor(max_workers=count) as pool:
            reports = list(pool.map(lambda pair: _pair_report(*pair, dim, order, field), pairs))
        blocks = []
        for (earlier, later), report in zip(pairs, reports):
            rows = diagrams[earlier.timestamp] + diagrams[later.timestamp]
            blocks.append(csv_text(DIAGRAM_HEADER, rows) + "\n" + csv_text(DISTANCE_HEADER, report))
        click.echo("\n".join(blocks), nl=False)

    _guarded(action)


def main():
    cli(prog_name="hyperpersist")
