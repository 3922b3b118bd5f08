"""desctl: one executable for all model operations.

Exit codes: 0 = success / property holds, 1 = property fails (with a
witness on stdout), 2 = usage or input-format error.  ``--json`` switches
every verdict to machine-readable JSON; set ``DESCTL_COLOR=0`` to disable
ANSI styling.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import __version__, dot, espec, fms, sim
from .automata import (Automaton, BadQueryError, ModelFormatError,
                       load_automaton, save_automaton)
from .compose import ComposeError, parallel
from .control import (AlphabetError, check_controllability,
                      check_nonconflicting, supcon)

INPUT_ERRORS = (ModelFormatError, ComposeError, AlphabetError, BadQueryError,
                espec.SpecSyntaxError, espec.UnknownEventError, sim.ScriptError,
                OSError)


def _fail(message: str) -> "SystemExit":
    click.echo(f"desctl: {message}", err=True)
    return SystemExit(2)


def _load(path: str) -> Automaton:
    try:
        return load_automaton(path)
    except INPUT_ERRORS as exc:
        raise _fail(str(exc))


def _use_color() -> bool:
    return os.environ.get("DESCTL_COLOR", "1") != "0" and sys.stdout.isatty()


def _verdict(message: str, ok: bool) -> None:
    if _use_color():
        click.secho(message, fg="green" if ok else "red")
    else:
        click.echo(message)


def _emit_json(payload: dict) -> None:
    click.echo(json.dumps(payload, indent=2))


@click.group()
@click.version_option(__version__, prog_name="desctl")
def main():
    """Supervisory-control toolkit for discrete-event systems."""


@main.command("validate")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="JSON verdict on stdout.")
def cmd_validate(model, as_json):
    """Check an automaton file against the structural invariants."""
    a = _load(model)
    diags = a.validate()
    if as_json:
        _emit_json({"valid": not diags, "diagnostics": diags})
    elif diags:
        for d in diags:
            click.echo(d)
    else:
        _verdict("ok", True)
    raise SystemExit(0 if not diags else 1)


@main.command("compose")
@click.argument("models", nargs=-1, required=True,
                type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
@click.option("--delim", default="|", show_default=True,
              help="Delimiter for composite state names.")
def cmd_compose(models, output, delim):
    """Parallel composition of two or more automaton files."""
    automata = [_load(m) for m in models]
    try:
        product = parallel(automata, delimiter=delim)
    except ComposeError as exc:
        raise _fail(str(exc))
    save_automaton(product, output)
    click.echo(f"{len(product.states)} states, {len(product.alphabet)} events "
               f"-> {output}")


@main.command("compile-spec")
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--alphabet", "alphabet_model", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Model file whose alphabet the expression is compiled over.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def cmd_compile_spec(spec, alphabet_model, output):
    """Compile a spec expression file to a minimal trim automaton."""
    alphabet = _load(alphabet_model).alphabet
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            text = fh.read()
        compiled = espec.compile_text(text, alphabet,
                                      name=os.path.splitext(os.path.basename(spec))[0])
    except INPUT_ERRORS as exc:
        raise _fail(str(exc))
    save_automaton(compiled, output)
    click.echo(f"{len(compiled.states)} states -> {output}")


@main.command("minimize")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def cmd_minimize(model, output):
    """Minimize an automaton, preserving generated and marked languages."""
    a = espec.minimize(_load(model))
    save_automaton(a, output)
    click.echo(f"{len(a.states)} states -> {output}")


@main.command("equivalent")
@click.argument("model_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("model_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def cmd_equivalent(model_a, model_b, as_json):
    """Are two automata language-equivalent (generated and marked)?"""
    eq, witness = espec.equivalent(_load(model_a), _load(model_b))
    if as_json:
        _emit_json({"equivalent": eq,
                    "distinguishing": None if eq else list(witness)})
    elif eq:
        _verdict("equivalent", True)
    else:
        _verdict(f"not equivalent: {' '.join(witness) if witness else '(empty string)'}",
                 False)
    raise SystemExit(0 if eq else 1)


@main.command("export-dot")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", type=click.Path(dir_okay=False),
              help="Output file; stdout when omitted.")
def cmd_export_dot(model, output):
    """Render an automaton as Graphviz DOT."""
    text = dot.export_dot(_load(model))
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _maybe_partition(a: Automaton, partition: str | None) -> Automaton:
    return a if partition is None else fms.apply_partition(a, partition)


@main.command("check-ctrl")
@click.option("--plant", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sup", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--partition", type=click.Choice(fms.PARTITIONS), default=None,
              help="Re-flag corpus events per a named controllability partition.")
@click.option("--json", "as_json", is_flag=True)
def cmd_check_ctrl(plant, sup, partition, as_json):
    """Verify a supervisor's controllability against a plant."""
    plant_a = _maybe_partition(_load(plant), partition)
    sup_a = _maybe_partition(_load(sup), partition)
    try:
        report = check_controllability(plant_a, sup_a)
    except AlphabetError as exc:
        raise _fail(str(exc))
    if as_json:
        ce = None
        if report.counterexample is not None:
            s, e = report.counterexample
            ce = {"s": list(s), "e": e}
        _emit_json({"controllable": report.controllable, "counterexample": ce,
                    "states_checked": report.states_checked})
    elif report.controllable:
        _verdict("controllable", True)
    else:
        s, e = report.counterexample
        click.echo(" ".join(list(s) + ["|", e]))
    raise SystemExit(0 if report.controllable else 1)


@main.command("check-conflict")
@click.option("--plant", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sup", "sups", multiple=True, required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--json", "as_json", is_flag=True)
def cmd_check_conflict(plant, sups, as_json):
    """Check that the modular closed loop is nonblocking."""
    plant_a = _load(plant)
    sup_list = [_load(s) for s in sups]
    try:
        report = check_nonconflicting(plant_a, sup_list)
    except (AlphabetError, ComposeError) as exc:
        raise _fail(str(exc))
    if as_json:
        _emit_json({"nonconflicting": report.nonconflicting,
                    "counterexample": None if report.nonconflicting
                    else list(report.counterexample),
                    "states_checked": report.states_checked})
    elif report.nonconflicting:
        _verdict("nonconflicting", True)
    else:
        click.echo(" ".join(report.counterexample) or "(empty string)")
    raise SystemExit(0 if report.nonconflicting else 1)


@main.command("synth")
@click.option("--plant", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--spec", "spec_path", required=True,
              type=click.Path(exists=True, dir_okay=False),
              help="Spec expression file, compiled over the plant alphabet.")
@click.option("-o", "--output", required=True, type=click.Path(dir_okay=False))
def cmd_synth(plant, spec_path, output):
    """Synthesize the supremal controllable supervisor for a spec."""
    plant_a = _load(plant)
    try:
        with open(spec_path, "r", encoding="utf-8") as fh:
            spec_a = espec.compile_text(
                fh.read(), plant_a.alphabet,
                name=os.path.splitext(os.path.basename(spec_path))[0])
        result = supcon(plant_a, spec_a)
    except INPUT_ERRORS as exc:
        raise _fail(str(exc))
    save_automaton(result, output)
    note = " (empty: no controllable behavior)" if result.is_empty else ""
    click.echo(f"{len(result.states)} states -> {output}{note}")


@main.command("simulate")
@click.option("--plant", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sup", "sups", multiple=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--script", "script_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--random", "random_mode", is_flag=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--interactive", "interactive_mode", is_flag=True)
@click.option("--steps", required=True, type=click.IntRange(min=0))
@click.option("--report", "report_path", type=click.Path(dir_okay=False))
def cmd_simulate(plant, sups, script_path, random_mode, interactive_mode,
                 seed, steps, report_path):
    """Run the closed loop under a scripted, random or interactive policy."""
    modes = sum(map(bool, (script_path, random_mode, interactive_mode)))
    if modes != 1:
        raise _fail("choose exactly one of --script, --random, --interactive")
    plant_a = _load(plant)
    sup_list = [_load(s) for s in sups]
    if script_path:
        with open(script_path, "r", encoding="utf-8") as fh:
            events = []
            for line in fh:
                line = line.split("#", 1)[0]
                events.extend(line.split())
        policy: sim.Policy = sim.Scripted(tuple(events))
    elif random_mode:
        policy = sim.Random(seed)
    else:
        policy = sim.Interactive()
    try:
        report = sim.run(plant_a, sup_list, policy, steps)
    except INPUT_ERRORS as exc:
        raise _fail(str(exc))
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(sim.report_to_json(report))
    status = []
    if report.blocked_event is not None:
        status.append(f"blocked on {report.blocked_event}")
    if report.deadlocked:
        status.append("deadlocked")
    click.echo(f"{report.steps_taken} steps, completions "
               f"cat1={report.completions['1']} cat2={report.completions['2']}"
               + (f" ({', '.join(status)})" if status else ""))
    raise SystemExit(1 if (report.deadlocked or report.blocked_event is not None) else 0)


@main.group("fms")
def cmd_fms():
    """The shipped flexible-manufacturing reference corpus."""


@cmd_fms.command("emit")
@click.option("-o", "--outdir", required=True, type=click.Path(file_okay=False))
def cmd_fms_emit(outdir):
    """Write every corpus model, spec expression and the event table."""
    written = fms.emit(outdir)
    click.echo(f"wrote {len(written)} files to {outdir}")


if __name__ == "__main__":
    main()
