"""Command-line front end.

Subcommands cover the whole pipeline: ``measure`` grounds, forgets both
ways and reports probabilities and losses; ``forget`` prints the forgetting
results themselves; ``compile`` emits ProbLog text; ``count`` and
``sample`` expose exact and approximate model counting.

Exit codes: 0 success, 2 parse error, 3 capacity exceeded (retry with
``--mode sample``), 4 empty grounding domain.  Identical inputs and flags
produce byte-identical output, sampled runs included.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .errors import CapacityError, EmptyDomainError, FlossError, ParseError
from .formulas import DEFAULT_CAP, Theory, ground, ground_vocabulary, is_propositional
from .forgetting import expand_policy, forget_strong, forget_weak
from .measure import (
    ProbabilitySpec,
    estimate_probability,
    format_probability,
    loss_measures,
    model_count,
)
from .parsing import TheoryFile, parse_theory_file, render
from .programs import compile_fo, compile_prop, emit_problog

EXIT_PARSE = 2
EXIT_CAPACITY = 3
EXIT_EMPTY_DOMAIN = 4


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(path: str) -> TheoryFile:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        _fail(str(exc), EXIT_PARSE)
    try:
        return parse_theory_file(text)
    except ParseError as exc:
        _fail(f"{path}:{exc}", EXIT_PARSE)


def _theory(tf: TheoryFile, path: str) -> Theory:
    return Theory(Path(path).stem, tuple(tf.formulas))


def _file_spec(tf: TheoryFile) -> ProbabilitySpec:
    try:
        return ProbabilitySpec(tuple(tf.facts), tuple(tuple(ad) for ad in tf.disjunctions))
    except ValueError as exc:
        _fail(str(exc), EXIT_PARSE)


def _policy(tf: TheoryFile, override: str | None) -> tuple[str, ...]:
    if override is not None:
        return tuple(p for p in (s.strip() for s in override.split(",")) if p)
    return tf.policy or ()


def _guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except CapacityError as exc:
        _fail(f"{exc}; use --mode sample or raise --cap", EXIT_CAPACITY)
    except EmptyDomainError as exc:
        _fail(str(exc), EXIT_EMPTY_DOMAIN)
    except FlossError as exc:
        _fail(str(exc), 1)


@click.group()
def main():
    """Forgetting operators and loss-of-inferential-strength measures."""


@main.command()
@click.argument("file", type=click.Path())
@click.option("--policy", default=None, help="Comma-separated symbols to forget (overrides the file).")
@click.option("--mode", type=click.Choice(["exact", "sample"]), default="exact", show_default=True)
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cap", type=int, default=DEFAULT_CAP, show_default=True,
              help="Maximum atom count for exact enumeration.")
@click.option("--json", "as_json", is_flag=True, help="Machine-readable report.")
def measure(file, policy, mode, samples, seed, cap, as_json):
    """Probabilities and losses for forgetting POLICY from FILE."""
    tf = _load(file)
    report = _guard(
        loss_measures,
        _theory(tf, file),
        _policy(tf, policy),
        _file_spec(tf),
        mode="exact" if mode == "exact" else "sampled",
        domain=tf.domain,
        samples=samples,
        seed=seed,
        cap=cap,
    )
    if as_json:
        click.echo(json.dumps(report.to_json_dict(), indent=2))
        return
    click.echo(f"theory: {report.theory}")
    click.echo(f"policy: {', '.join(report.policy) if report.policy else '(none)'}")
    click.echo(f"mode: {report.mode}")
    click.echo(f"worlds: {report.world_count}")
    for name in ("p_theory", "p_strong", "p_weak", "loss_nc", "loss_sc", "loss_t"):
        click.echo(f"{name} = {format_probability(getattr(report, name))}")
    if report.limiting_flags:
        click.echo(f"limiting: {', '.join(report.limiting_flags)}")
    if report.rng is not None:
        click.echo(
            f"rng: {report.rng.algorithm} seed={report.rng.seed} samples={report.rng.samples}"
        )


@main.command()
@click.argument("file", type=click.Path())
@click.option("--op", type=click.Choice(["strong", "weak", "both"]), default="both", show_default=True)
@click.option("--policy", default=None, help="Comma-separated symbols to forget (overrides the file).")
def forget(file, op, policy):
    """Print the strong and/or weak forgetting of FILE's theory."""
    tf = _load(file)
    theory = _theory(tf, file)

    def run():
        vocab = ground_vocabulary(theory, tf.domain)
        grounded = ground(theory, tf.domain)
        atoms = expand_policy(_policy(tf, policy), vocab)
        out = []
        if op in ("strong", "both"):
            out.append(("strong", forget_strong(grounded, atoms)))
        if op in ("weak", "both"):
            out.append(("weak", forget_weak(grounded, atoms)))
        return out

    results = _guard(run)
    for label, formula in results:
        if op == "both":
            click.echo(f"{label}: {render(formula)}")
        else:
            click.echo(render(formula))


@main.command(name="compile")
@click.argument("file", type=click.Path())
@click.option("--spec", "spec_mode", type=click.Choice(["uniform", "file"]), default="file",
              show_default=True, help="Probability lines to emit.")
def compile_cmd(file, spec_mode):
    """Compile FILE's theory to a ProbLog program on standard output."""
    tf = _load(file)
    theory = _theory(tf, file)
    spec = ProbabilitySpec.uniform() if spec_mode == "uniform" else _file_spec(tf)

    def run():
        formula = theory.as_formula()
        if all(is_propositional(f) for f in theory.formulas):
            program = compile_prop(formula)
        else:
            program = compile_fo(formula)
        return emit_problog(program, spec, queries=[program.root], domain=tf.domain)

    click.echo(_guard(run), nl=False)


@main.command()
@click.argument("file", type=click.Path())
@click.option("--cap", type=int, default=DEFAULT_CAP, show_default=True)
def count(file, cap):
    """Exact model count of FILE's theory over its ground vocabulary."""
    tf = _load(file)
    theory = _theory(tf, file)

    def run():
        vocab = ground_vocabulary(theory, tf.domain)
        return model_count(ground(theory, tf.domain), vocab, cap)

    click.echo(_guard(run))


@main.command()
@click.argument("file", type=click.Path())
@click.option("--samples", type=int, default=100_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def sample(file, samples, seed):
    """Estimate the probability of FILE's theory by sampling."""
    tf = _load(file)
    theory = _theory(tf, file)
    spec = _file_spec(tf)

    def run():
        vocab = ground_vocabulary(theory, tf.domain)
        return estimate_probability(spec, ground(theory, tf.domain), samples, seed, vocab)

    est = _guard(run)
    click.echo(f"estimate = {format_probability(est.value)}")
    click.echo(f"stderr = {est.stderr!r}")
    click.echo(f"samples = {est.samples}")
    click.echo(f"seed = {est.seed}")
    click.echo(f"algorithm = {est.algorithm}")


if __name__ == "__main__":
    main()
