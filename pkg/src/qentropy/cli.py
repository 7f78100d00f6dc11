"""Command-line interface.

Exit codes: 0 success, 1 a checked inequality or bound failed, 2 bad
configuration (unknown option, malformed channel file, invalid value).
Every command requires --seed and is fully deterministic under it; report
files are byte-stable across reruns and worker counts.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import serialize
from .linalg import ValidationError
from .qstate import RngStream
from .channel import (
    KrausChannel,
    MeasurePrepareChannel,
    dephasing,
    dephasing_mp,
    depolarizing,
    identity_channel,
    random_channel,
    random_mp_channel,
)
from .inequalities import ALL_NAMES, CORE_NAMES, DEFAULT_MIN_SLACK, FuzzConfig, run_fuzz
from .capacity import (
    OptimizerConfig,
    additivity_probe,
    check_ce_chi_bound,
    check_eb_ce_bound,
    optimize_ce,
    optimize_chi,
)

ZOO = ("identity", "depolarizing", "dephasing", "dephasing-mp")


def _config_error(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        _config_error(f"cannot parse dimension list {text!r}")
    if not dims:
        _config_error("empty dimension list")
    return dims


def _zoo_channel(name: str, dim: int, p: float | None):
    if name == "identity":
        return identity_channel(dim)
    if name == "depolarizing":
        return depolarizing(dim, 1.0 if p is None else p)
    if name == "dephasing":
        return dephasing(dim)
    if name == "dephasing-mp":
        return dephasing_mp(dim)
    _config_error(f"unknown zoo channel {name!r}; known: {', '.join(ZOO)}")


def _load_channel(path: str):
    try:
        obj = serialize.from_doc(serialize.load_json(path))
    except (OSError, ValueError) as exc:
        _config_error(f"cannot load channel from {path}: {exc}")
    if not isinstance(obj, (KrausChannel, MeasurePrepareChannel)):
        _config_error(f"{path} does not describe a channel")
    return obj


def _pick_channel(zoo: str | None, channel_file: str | None, dim: int, p: float | None):
    if (zoo is None) == (channel_file is None):
        _config_error("pass exactly one of --zoo or --channel")
    if zoo is not None:
        return _zoo_channel(zoo, dim, p)
    return _load_channel(channel_file)


def _echo_check(result, fmt: str):
    if fmt == "json":
        click.echo(serialize.dumps(result.to_doc()), nl=False)
        return
    status = "pass" if result.passed else "FAIL"
    click.echo(
        f"{result.name:<34} lhs={result.lhs:.6f} rhs={result.rhs:.6f} "
        f"slack={result.slack:+.3e} [{status}]"
    )


seed_option = click.option("--seed", type=int, required=True, help="RNG seed (required; no clock default).")
out_option = click.option("--out", type=click.Path(file_okay=False), default="results", show_default=True, help="Output directory for reports.")
format_option = click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table", show_default=True)


@click.group()
def main():
    """Entropy-inequality fuzzing and channel-capacity estimation."""


@main.command("verify-inequalities")
@seed_option
@click.option("--trials", type=int, default=1000, show_default=True)
@click.option("--dims", default="2,3,4", show_default=True, help="Comma-separated subsystem dimensions to sample.")
@click.option("--tol", type=float, default=DEFAULT_MIN_SLACK, show_default=True, help="Minimum accepted slack; trials below it fail.")
@click.option("--workers", type=int, default=1, show_default=True)
@click.option("--inequality", "names", multiple=True, help="Restrict to these inequalities (repeatable).")
@out_option
@format_option
def cmd_verify_inequalities(seed, trials, dims, tol, workers, names, out, fmt):
    """Fuzz the entropy inequalities and write JSON reports plus witnesses."""
    selected = tuple(names) if names else CORE_NAMES
    try:
        cfg = FuzzConfig(
            seed=seed,
            trials=trials,
            dims=_parse_dims(dims),
            min_slack=tol,
            workers=workers,
            out_dir=out,
            inequalities=selected,
        )
    except ValidationError as exc:
        _config_error(str(exc))
    reports = run_fuzz(cfg)
    failures = sum(r.failures for r in reports)
    if fmt == "json":
        click.echo(serialize.dumps([r.to_doc() for r in reports]), nl=False)
    else:
        click.echo(f"{'inequality':<34} {'trials':>7} {'fail':>5} {'auto':>5} {'min slack':>12} {'mean slack':>12}")
        for r in reports:
            mins = "n/a" if r.min_slack is None else f"{r.min_slack:+.3e}"
            means = "n/a" if r.mean_slack is None else f"{r.mean_slack:+.3e}"
            click.echo(f"{r.inequality:<34} {r.trials:>7} {r.failures:>5} {r.auto_passes:>5} {mins:>12} {means:>12}")
        click.echo(f"total failures: {failures}; reports under {out}/reports")
    sys.exit(0 if failures == 0 else 1)


@main.command("capacity")
@click.argument("which", type=click.Choice(["chi", "ce"]))
@seed_option
@click.option("--zoo", type=str, default=None, help=f"Named channel: {', '.join(ZOO)}.")
@click.option("--channel", "channel_file", type=click.Path(exists=False), default=None, help="JSON channel file.")
@click.option("--dim", type=int, default=2, show_default=True, help="Dimension for zoo channels.")
@click.option("--p", type=float, default=None, help="Weight parameter for the depolarizing channel.")
@click.option("--restarts", type=int, default=20, show_default=True)
@click.option("--max-iters", type=int, default=2000, show_default=True)
@click.option("--ensemble-size", type=int, default=None, help="Pure states in the ensemble (default d^2).")
@out_option
@format_option
def cmd_capacity(which, seed, zoo, channel_file, dim, p, restarts, max_iters, ensemble_size, out, fmt):
    """Estimate a capacity quantity for one channel (lower bound, in bits)."""
    ch = _pick_channel(zoo, channel_file, dim, p)
    try:
        cfg = OptimizerConfig(seed=seed, restarts=restarts, max_iters=max_iters, ensemble_size=ensemble_size)
        est = optimize_chi(ch, cfg) if which == "chi" else optimize_ce(ch, cfg)
    except ValidationError as exc:
        _config_error(str(exc))
    label = zoo if zoo is not None else Path(channel_file).stem
    doc = {"seed": seed, "channel": label, "estimate": est.to_doc()}
    serialize.save_json(Path(out) / "reports" / "capacity" / f"{which}-{label}-{seed}.json", doc)
    if fmt == "json":
        click.echo(serialize.dumps(doc), nl=False)
    else:
        state = "converged" if est.converged else "NOT converged"
        click.echo(f"{which} estimate for {label}: {est.value:.6f} bits ({state}, {est.restarts_used} restarts)")
    sys.exit(0)


@main.command("bounds")
@seed_option
@click.option("--trials-eb", type=int, default=20, show_default=True, help="Random measure-and-prepare channels to test.")
@click.option("--trials-general", type=int, default=20, show_default=True, help="Random channels for the chi comparison.")
@click.option("--dim", type=int, default=2, show_default=True)
@click.option("--restarts", type=int, default=6, show_default=True)
@out_option
@format_option
def cmd_bounds(seed, trials_eb, trials_general, dim, restarts, out, fmt):
    """Check capacity bounds on random channels; exit 1 on any failure."""
    if dim < 2 or dim > 3:
        _config_error("bounds supports dimensions 2 and 3")
    results = []
    for t in range(trials_eb):
        gen = RngStream(seed, t).child(0).generator()
        mp = random_mp_channel(dim, dim, int(gen.integers(2, dim * dim + 1)), gen)
        cfg = OptimizerConfig(seed=seed + t, restarts=restarts, max_iters=400)
        results.append(check_eb_ce_bound(mp, cfg))
    for t in range(trials_general):
        gen = RngStream(seed, t).child(1).generator()
        ch = random_channel(dim, dim, int(gen.integers(1, dim * dim + 1)), gen)
        cfg = OptimizerConfig(seed=seed + t, restarts=restarts, max_iters=400)
        results.append(check_ce_chi_bound(ch, cfg))
    docs = [r.to_doc() for r in results]
    serialize.save_json(Path(out) / "reports" / "bounds" / f"{seed}.json", docs)
    if fmt == "json":
        click.echo(serialize.dumps(docs), nl=False)
    else:
        for r in results:
            _echo_check(r, fmt)
    failures = sum(1 for r in results if not r.passed)
    sys.exit(0 if failures == 0 else 1)


@main.command("additivity-probe")
@seed_option
@click.option("--pairs", type=int, default=20, show_default=True)
@click.option("--dim", type=int, default=2, show_default=True, help="Factor dimension (product must stay at or below 9).")
@click.option("--restarts", type=int, default=12, show_default=True)
@click.option("--tensor-restarts", type=int, default=None, help="Random restarts for the tensor run (default restarts // 5).")
@out_option
@format_option
def cmd_additivity_probe(seed, pairs, dim, restarts, tensor_restarts, out, fmt):
    """Estimate additivity gaps for measure-and-prepare x random channel pairs."""
    if dim * dim > 9:
        _config_error(f"product dimension {dim * dim} exceeds the supported 9")
    results = []
    for t in range(pairs):
        gen = RngStream(seed, t).child(2).generator()
        eb = random_mp_channel(dim, dim, int(gen.integers(2, dim * dim + 1)), gen)
        other = random_channel(dim, dim, int(gen.integers(1, dim * dim + 1)), gen)
        cfg = OptimizerConfig(seed=seed + t, restarts=restarts, max_iters=600)
        result = additivity_probe(eb, other, cfg, tensor_restarts=tensor_restarts)
        results.append(result)
        if not result.passed:
            witness = {
                "pair": t,
                "result": result.to_doc(),
                "eb_channel": serialize.to_doc(eb),
                "other_channel": serialize.to_doc(other),
            }
            serialize.save_json(Path(out) / "witnesses" / "additivity" / f"{seed}-pair{t}.json", witness)
            click.echo(f"ADDITIVITY GAP at pair {t}: gap={result.extras['gap']:+.4e} (witness written)", err=True)
    docs = [r.to_doc() for r in results]
    serialize.save_json(Path(out) / "reports" / "additivity" / f"{seed}.json", docs)
    if fmt == "json":
        click.echo(serialize.dumps(docs), nl=False)
    else:
        for r in results:
            _echo_check(r, fmt)
        gaps = [r.extras["gap"] for r in results]
        click.echo(f"max |gap| over {pairs} pairs: {max(abs(g) for g in gaps):.3e}")
    failures = sum(1 for r in results if not r.passed)
    sys.exit(0 if failures == 0 else 1)


if __name__ == "__main__":
    main()
