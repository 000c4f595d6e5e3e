"""Command-line interface: reduce, translen, act, fa-check, verify and ball-dump."""

import logging
import sys
from typing import Any, Dict, Optional, Sequence

import click

from autfa.automorphisms import SamplePolicy, parse_automorphism, verify_relation_suite
from autfa.bstree import (
    TreeVertex,
    build_ball,
    translation_length_adaptive,
    translation_length_oracle,
)
from autfa.config import (
    DEFAULT_EQUIVARIANCE_RADIUS,
    DEFAULT_INNER_BOUND,
    DEFAULT_RADIUS,
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    Config,
    OutputFormat,
)
from autfa.errors import AutfaError, ValidationError
from autfa.fa_decision import decide, explain
from autfa.gog import Shape, free_product_as_gog, translation_length
from autfa.groups import FiniteGroup
from autfa.io import (
    dump_json,
    load_factor_classes,
    parse_factor_counts,
    parse_signature,
    resolve_group,
    write_text,
)
from autfa.quotient_action import (
    equivariance_suite,
    invariance_suite_H_Z,
    invariance_suite_two_factors,
    no_prop_T_generator_images,
    no_prop_T_quotient,
    out_presentation_suite,
    tripod_action_geometry,
)
from autfa.reports import SuiteReport
from autfa.tree_geometry import run_lemma_suite
from autfa.words import (
    FreeProductSignature,
    cyclically_reduce,
    format_word,
    parse_word,
    syllable_length,
)

logger = logging.getLogger(__name__)

EXIT_ERROR = 3
EXIT_USAGE = 64

SUITES = (
    "relations",
    "two-factors",
    "hz",
    "out-tripod",
    "tripod-geom",
    "equivariance",
    "lemmas",
    "quotient",
)

DEFAULT_SUITE_GROUPS = {
    "relations": "C2,C3,S3",
    "two-factors": "C2,C3",
    "hz": "C2",
    "out-tripod": "C2",
    "tripod-geom": "C2",
    "equivariance": "C2,C3",
    "lemmas": "",
    "quotient": "C2,C2,C3,C3",
}

SUITE_RADIUS = {"tripod-geom": 3, "equivariance": DEFAULT_EQUIVARIANCE_RADIUS}


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s", force=True
    )


def _emit(ctx: click.Context, data: Dict[str, Any], text: str) -> None:
    config: Config = ctx.obj
    if config.output_format is OutputFormat.JSON:
        click.echo(dump_json(data), nl=False)
    else:
        click.echo(text)


def _config(ctx: click.Context, subcommand: str, **options: Any) -> Config:
    base: Config = ctx.obj
    return Config(
        subcommand=subcommand,
        output_format=base.output_format,
        jobs=base.jobs,
        **options,
    )


@click.group()
@click.option("-v", "--verbose", count=True, help="Log INFO (-v) or DEBUG (-vv) to stderr.")
@click.option(
    "--format",
    "output_format",
    type=click.Choice([f.value for f in OutputFormat]),
    default=OutputFormat.TEXT.value,
    help="Output rendering.",
)
@click.option("--jobs", type=int, default=1, help="Worker threads for suite instances.")
@click.pass_context
def cli(ctx: click.Context, verbose: int, output_format: str, jobs: int) -> None:
    """Free products, their automorphisms and actions on Bass-Serre trees."""
    _configure_logging(verbose)
    ctx.obj = Config(output_format=OutputFormat(output_format), jobs=jobs)


@cli.command()
@click.argument("word")
@click.option("--groups", "-g", required=True, help="Factor list, e.g. C2,C3 or C2*Z.")
@click.pass_context
def reduce(ctx: click.Context, word: str, groups: str) -> None:
    """Normal form and cyclic reduction of WORD."""
    sig = parse_signature(groups)
    w = parse_word(word, sig)
    c, h = cyclically_reduce(w)
    data = {
        "signature": sig.describe(),
        "reduced": format_word(w),
        "cyclic": format_word(c.word),
        "conjugator": format_word(h),
        "cyclic_length": syllable_length(c),
    }
    text = (
        f"reduced: {data['reduced']}\n"
        f"cyclic:  {data['cyclic']} (conjugator: {data['conjugator']},"
        f" length {data['cyclic_length']})"
    )
    _emit(ctx, data, text)


@cli.command()
@click.argument("word")
@click.option("--groups", "-g", required=True, help="Factor list, e.g. C2,C3.")
@click.option(
    "--shape",
    type=click.Choice([s.value for s in Shape]),
    default=Shape.SINGLE_EDGE.value,
    help="Graph of groups realising the free product.",
)
@click.option("--base", type=int, default=0, help="Base vertex of the realisation.")
@click.option(
    "--oracle", "radius", type=int, default=None, help="Also minimise over a ball of this radius."
)
@click.pass_context
def translen(
    ctx: click.Context, word: str, groups: str, shape: str, base: int, radius: Optional[int]
) -> int:
    """Translation length of WORD, symbolically and on the tree."""
    ball_radius = radius if radius is not None else DEFAULT_RADIUS
    config = _config(ctx, "translen", word=word, radius=ball_radius)
    sig = parse_signature(groups)
    realisation = free_product_as_gog(sig, Shape(shape), base=base)
    w = parse_word(config.word, sig)
    loop = realisation.embed(w)
    data: Dict[str, Any] = {
        "word": format_word(w),
        "shape": shape,
        "symbolic": realisation.expected_translation_length(w),
        "path": translation_length(loop),
    }
    if radius is not None:
        data["oracle"] = translation_length_oracle(loop, config.radius)
        data["adaptive"] = translation_length_adaptive(loop)
    values = {k: data[k] for k in ("symbolic", "path", "oracle", "adaptive") if k in data}
    agree = len(set(values.values())) == 1
    data["agree"] = agree
    text = " ".join(f"{k}={v}" for k, v in values.items())
    _emit(ctx, data, text if agree else f"{text} MISMATCH")
    return 0 if agree else 1


@cli.command()
@click.argument("automorphism")
@click.argument("word")
@click.option("--groups", "-g", required=True, help="Factor list, e.g. C2,C3.")
@click.pass_context
def act(ctx: click.Context, automorphism: str, word: str, groups: str) -> None:
    """Apply AUTOMORPHISM (atoms separated by ';') to WORD."""
    sig = parse_signature(groups)
    alpha = parse_automorphism(automorphism, sig)
    w = parse_word(word, sig)
    image = alpha(w)
    before, after = cyclically_reduce(w)[0], cyclically_reduce(image)[0]
    data = {
        "automorphism": alpha.to_text(),
        "word": format_word(w),
        "image": format_word(image),
        "cyclic_length": [syllable_length(before), syllable_length(after)],
    }
    _emit(ctx, data, format_word(image))


@cli.command("fa-check")
@click.option("--factors", default=None, help="Factor counts, e.g. C2:4,S3:1 or Z:3.")
@click.option("--factors-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--explain", "show_trace", is_flag=True, help="Print the rules that fired.")
@click.pass_context
def fa_check(
    ctx: click.Context, factors: Optional[str], factors_file: Optional[str], show_trace: bool
) -> int:
    """Decide Property (FA) for Aut of a free product; exit 0 FA, 1 NotFA, 2 Unknown."""
    if (factors is None) == (factors_file is None):
        raise click.UsageError("give exactly one of --factors and --factors-file")
    if factors is not None:
        classes = parse_factor_counts(factors)
    else:
        classes = load_factor_classes(str(factors_file))
    verdict = decide(classes)
    _emit(ctx, verdict.to_dict(), explain(verdict) if show_trace else verdict.result.value)
    return verdict.exit_code


def _need(groups: Sequence[FiniteGroup], count: int, suite: str) -> None:
    if len(groups) != count:
        raise click.BadParameter(
            f"the {suite} suite takes {count} group(s), got {len(groups)}", param_hint="--groups"
        )


def run_suite(
    suite: str,
    groups: Sequence[FiniteGroup],
    trials: int = DEFAULT_TRIALS,
    seed: int = DEFAULT_SEED,
    radius: Optional[int] = None,
    inner_bound: int = DEFAULT_INNER_BOUND,
    samples: Optional[int] = None,
    jobs: int = 1,
) -> SuiteReport:
    """Run one named verification suite; a missing ``radius`` uses the suite's own default."""
    if radius is None:
        radius = SUITE_RADIUS.get(suite, DEFAULT_RADIUS)
    logger.info("running %s on %s", suite, ",".join(g.name for g in groups) or "-")
    if suite == "relations":
        sig = FreeProductSignature.of(*groups)
        policy = SamplePolicy(exhaustive=samples is None, samples=samples or 0, seed=seed)
        return verify_relation_suite(sig, policy, jobs=jobs)
    if suite == "two-factors":
        _need(groups, 2, suite)
        return invariance_suite_two_factors(groups[0], groups[1], trials, seed, jobs=jobs)
    if suite == "hz":
        _need(groups, 1, suite)
        return invariance_suite_H_Z(groups[0], trials, seed, jobs=jobs)
    if suite == "out-tripod":
        _need(groups, 1, suite)
        return out_presentation_suite(groups[0], inner_bound, jobs=jobs)
    if suite == "tripod-geom":
        _need(groups, 1, suite)
        return tripod_action_geometry(groups[0], radius)
    if suite == "equivariance":
        _need(groups, 2, suite)
        return equivariance_suite(groups[0], groups[1], radius, seed=seed)
    if suite == "lemmas":
        return run_lemma_suite(trials, seed)
    if suite == "quotient":
        sig = FreeProductSignature.of(*groups)
        return no_prop_T_generator_images(no_prop_T_quotient(sig), trials, seed)
    raise ValidationError(f"unknown suite {suite!r}")


@cli.command()
@click.option("--suite", type=click.Choice(SUITES), required=True)
@click.option("--groups", "-g", default=None, help="Groups for the suite (shipped names or files).")
@click.option("--trials", type=int, default=DEFAULT_TRIALS)
@click.option("--seed", type=int, default=DEFAULT_SEED)
@click.option(
    "--radius",
    type=int,
    default=None,
    help="Ball radius for tree suites (tripod-geom 3, equivariance 5).",
)
@click.option("--inner-bound", type=int, default=DEFAULT_INNER_BOUND)
@click.option(
    "--samples",
    type=int,
    default=None,
    help="Sample the relations suite instead of running it all.",
)
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False),
    default=None,
    help="Also write the JSON report here.",
)
@click.pass_context
def verify(
    ctx: click.Context,
    suite: str,
    groups: Optional[str],
    trials: int,
    seed: int,
    radius: Optional[int],
    inner_bound: int,
    samples: Optional[int],
    output: Optional[str],
) -> int:
    """Run a verification suite; exit 1 on any failure."""
    text = DEFAULT_SUITE_GROUPS[suite] if groups is None else groups
    config = _config(
        ctx,
        "verify",
        group_files=tuple(p for p in text.replace("*", ",").split(",") if p.strip()),
        trials=trials,
        seed=seed,
        radius=SUITE_RADIUS.get(suite, DEFAULT_RADIUS) if radius is None else radius,
        inner_bound=inner_bound,
    )
    resolved = [resolve_group(p) for p in config.group_files]
    report = run_suite(
        suite,
        resolved,
        trials=config.trials,
        seed=config.seed,
        radius=config.radius,
        inner_bound=config.inner_bound,
        samples=samples,
        jobs=config.jobs,
    )
    if output is not None:
        write_text(output, dump_json(report.to_dict()))
    _emit(ctx, report.to_dict(), report.summary())
    return 0 if report.passed else 1


@cli.command("ball-dump")
@click.option("--groups", "-g", required=True, help="Factor list, e.g. C2,C3.")
@click.option(
    "--shape",
    type=click.Choice([s.value for s in Shape]),
    default=Shape.SINGLE_EDGE.value,
)
@click.option("--radius", type=int, default=DEFAULT_RADIUS)
@click.option(
    "--output",
    "-o",
    type=click.Path(dir_okay=False),
    default=None,
    help="DOT file; stdout if omitted.",
)
@click.pass_context
def ball_dump(
    ctx: click.Context, groups: str, shape: str, radius: int, output: Optional[str]
) -> None:
    """Write a ball of the Bass-Serre tree in DOT format."""
    config = _config(ctx, "ball-dump", radius=radius)
    realisation = free_product_as_gog(parse_signature(groups), Shape(shape))
    ball = build_ball(TreeVertex.root(realisation.graph, realisation.base), config.radius)
    dot = ball.to_dot()
    if output is not None:
        write_text(output, dot)
        data = {"vertices": len(ball), "edges": ball.edge_count, "output": output}
        _emit(ctx, data, f"wrote {output}")
    else:
        _emit(ctx, {"vertices": len(ball), "edges": ball.edge_count, "dot": dot}, dot.rstrip("\n"))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run the CLI and return its exit code.

    Exit codes: 0 success or FA, 1 failed checks or NotFA, 2 Unknown,
    3 library errors, 64 usage errors.
    """
    try:
        args = list(argv) if argv is not None else None
        rv = cli.main(args=args, prog_name="autfa", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_ERROR
    except AutfaError as e:
        click.echo(f"error: {e}", err=True)
        return EXIT_ERROR
    return rv if isinstance(rv, int) else 0


def run() -> None:
    """Console-script entry point."""
    sys.exit(main())
