"""Command-line surface: run, campaign, analyze, export-graph, serve.

The CLI is a thin client of the HTTP service; by default the app runs
in-process, with `--server URL` any command targets a remote instance
instead. Exit codes: 0 success, 2 config error, 3 I/O error, 4 undefined
metric.
"""

from __future__ import annotations

import secrets
import sys
import time
from pathlib import Path

import click

from polepi.client import ServiceClient
from polepi.errors import ConfigError, PolepiError
from polepi.experiments import CAMPAIGN_NAMES


def _parse_value(text: str):
    low = text.strip()
    if low.lower() in ("true", "false"):
        return low.lower() == "true"
    try:
        return int(low)
    except ValueError:
        pass
    try:
        return float(low)
    except ValueError:
        pass
    return low


def load_config_file(path: str) -> dict:
    """Flat `dotted.path = value` lines; '#' starts a comment."""
    overrides: dict = {}
    try:
        text = Path(path).read_text()
    except OSError:
        raise
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        overrides[key.strip()] = _parse_value(value)
    return overrides


def _collect_overrides(config, sets, named: dict) -> dict:
    overrides: dict = {}
    if config:
        overrides.update(load_config_file(config))
    for item in sets:
        if "=" not in item:
            raise ConfigError(f"--set expects path=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = _parse_value(value)
    for path, value in named.items():
        if value is not None:
            overrides[path] = value
    return overrides


def _fail(exc: Exception) -> None:
    if isinstance(exc, PolepiError):
        click.echo(f"error ({exc.category}): {exc}", err=True)
        sys.exit(exc.exit_code)
    if isinstance(exc, OSError):
        click.echo(f"error (io): {exc}", err=True)
        sys.exit(3)
    raise exc


_named_run_options = [
    click.option("--gamma", type=float, default=None, help="Digital media influence (info.gamma, default 0.5)."),
    click.option("--beta", type=float, default=None, help="Infection rate (epi.beta, default 0.05)."),
    click.option("--mu", type=float, default=None, help="Recovery rate (epi.mu, default 0.01)."),
    click.option("--epsilon", type=float, default=None, help="Awareness attenuation of beta (epi.epsilon, default 0.0 = full protection)."),
    click.option("--rho-i0", type=float, default=None, help="Initial infected proportion (epi.rho_i0, default 0.2)."),
    click.option("--rho-a0", type=float, default=None, help="Initial aware proportion (rho_a0, default 0.5)."),
    click.option("--steps", type=int, default=None, help="Simulation steps (default 50000)."),
    click.option("--epi-interval", type=int, default=None, help="Run one epidemic step every this many information steps (default 1)."),
    click.option("--record-interval", type=int, default=None, help="Sample observables every this many steps (0 = final state only)."),
    click.option("--nodes", type=int, default=None, help="Network size N (graph.n_nodes, default 1000)."),
    click.option("--m-attach", type=int, default=None, help="Edges per new node in graph growth (graph.m_attach, default 2)."),
    click.option("--p-triad", type=float, default=None, help="Triad formation probability (graph.p_triad, default 0.01)."),
    click.option("--homophily", type=float, default=None, help="Homophily exponent (info.h, default 32)."),
    click.option("--party-weight", type=float, default=None, help="Partisanship weight (info.c, default 2)."),
]

_NAMED_PATHS = {
    "gamma": "info.gamma",
    "beta": "epi.beta",
    "mu": "epi.mu",
    "epsilon": "epi.epsilon",
    "rho_i0": "epi.rho_i0",
    "rho_a0": "rho_a0",
    "steps": "steps",
    "epi_interval": "epi_interval",
    "record_interval": "record_interval",
    "nodes": "graph.n_nodes",
    "m_attach": "graph.m_attach",
    "p_triad": "graph.p_triad",
    "homophily": "info.h",
    "party_weight": "info.c",
}


def _with_run_options(fn):
    for opt in reversed(_named_run_options):
        fn = opt(fn)
    return fn


def _flatten_params(params: dict) -> dict:
    out: dict = {}

    def walk(prefix, node):
        if isinstance(node, dict):
            for key in sorted(node):
                walk(prefix + key + "." if isinstance(node[key], dict) else prefix + key, node[key])
        else:
            out[prefix] = node

    walk("", params)
    return out


@click.group()
def main():
    """polepi: coupled opinion-epidemic simulator, campaign runner and analysis tool."""


@main.command("run")
@_with_run_options
@click.option("--seed", type=int, default=None, help="Run seed; generated and printed when omitted.")
@click.option("--graph-seed", type=int, default=None, help="Graph seed (graph.seed); derived from --seed when omitted.")
@click.option("--config", type=str, default=None, help="Config file of 'dotted.path = value' lines; flags win.")
@click.option("--set", "sets", multiple=True, help="Generic override, repeatable: --set epi.beta=0.005.")
@click.option("--out", type=str, default=None, help="Also write the CSV to this file.")
@click.option("--server", type=str, default=None, help="Remote service URL (default: in-process).")
def cmd_run(seed, graph_seed, config, sets, out, server, **named):
    """Execute one simulation and print its params header, CSV and summary."""
    try:
        overrides = _collect_overrides(config, sets, {_NAMED_PATHS[k]: v for k, v in named.items()})
        if seed is None:
            seed = int(overrides.get("seed", secrets.randbits(63)))
            if "seed" not in overrides:
                click.echo(f"generated seed: {seed} (pass --seed {seed} to replay)", err=True)
        overrides["seed"] = seed
        if graph_seed is not None:
            overrides["graph.seed"] = graph_seed
        elif "graph.seed" not in overrides:
            from polepi.engine import graph_seed_for

            overrides["graph.seed"] = graph_seed_for(seed)
        client = ServiceClient(server)
        resp = client.run(overrides)
        for path, value in _flatten_params(resp["params"]).items():
            click.echo(f"# {path} = {value}")
        click.echo(resp["csv"], nl=False)
        final = resp["final"]
        click.echo(
            f"# final: step={final['step']} psi={final['psi']:.6f} "
            f"rho_a={final['rho_a']:.6f} rho_i={final['rho_i']:.6f}"
        )
        if out:
            Path(out).write_text(resp["csv"])
    except Exception as exc:
        _fail(exc)


@main.command("campaign")
@click.argument("name", type=click.Choice(CAMPAIGN_NAMES))
@click.option("--out", type=str, default=None, help="Output directory (default results/<name>).")
@click.option("--profile", type=click.Choice(["desk", "full"]), default="desk", show_default=True, help="desk = reduced replicates; full = paper-scale replicates.")
@click.option("--seed", type=int, default=0, show_default=True, help="Campaign base seed; keep it fixed to resume interrupted campaigns.")
@click.option("--replicates", type=int, default=None, help="Override the profile's replicate count.")
@click.option("--workers", type=int, default=None, help="Parallel worker processes (default: CPU count; 1 = fully serial).")
@click.option("--shared-graph", is_flag=True, help="Reuse one network for all runs instead of one per run.")
@click.option("--config", type=str, default=None, help="Config file of overrides applied to the campaign's base params.")
@click.option("--set", "sets", multiple=True, help="Base-params override, repeatable.")
@click.option("--server", type=str, default=None, help="Remote service URL (default: in-process).")
def cmd_campaign(name, out, profile, seed, replicates, workers, shared_graph, config, sets, server):
    """Run a named campaign: gamma-sweep, scenario-mild, scenario-severe, heatmap, epsilon-calibration."""
    try:
        overrides = _collect_overrides(config, sets, {})
        out_dir = out or f"results/{name}"
        client = ServiceClient(server)
        job = client.submit_campaign(
            {
                "name": name,
                "out_dir": out_dir,
                "profile": profile,
                "base_seed": seed,
                "workers": workers,
                "replicates": replicates,
                "overrides": overrides,
                "shared_graph": shared_graph,
            }
        )
        job_id = job["job_id"]
        total = job["total"]
        while job["state"] in ("queued", "running"):
            time.sleep(0.2)
            job = client.job(job_id)
            click.echo(f"\r{name}: {job['done']}/{total} runs", err=True, nl=False)
        click.echo("", err=True)
        if job["state"] == "failed":
            raise ConfigError(f"campaign failed: {job['error']}")
        click.echo(f"runs: {job['csv_path']}")
        click.echo(f"manifest: {job['manifest_path']}")
        for label, path in sorted(job["extra_paths"].items()):
            click.echo(f"{label}: {path}")
    except Exception as exc:
        _fail(exc)


@main.command("analyze")
@click.option("--runs", "runs_", multiple=True, required=True, help="label=path of a runs CSV; repeatable (e.g. --runs mild=results/scenario-mild/runs.csv).")
@click.option("--out", type=str, default=None, help="Directory for report.csv, per-label aggregates and summary.txt.")
@click.option("--server", type=str, default=None, help="Remote service URL (default: in-process).")
def cmd_analyze(runs_, out, server):
    """Correlation/residual battery over campaign outputs; prints the summary."""
    try:
        tables = {}
        for item in runs_:
            if "=" not in item:
                raise ConfigError(f"--runs expects label=path, got {item!r}")
            label, path = item.split("=", 1)
            tables[label.strip()] = Path(path).read_text()
        client = ServiceClient(server)
        resp = client.analyze(tables)
        click.echo(resp["summary"], nl=False)
        if out:
            out_path = Path(out)
            out_path.mkdir(parents=True, exist_ok=True)
            (out_path / "report.csv").write_text(resp["report_csv"])
            (out_path / "summary.txt").write_text(resp["summary"])
            for label, text in resp["aggregates_csv"].items():
                (out_path / f"aggregates_{label}.csv").write_text(text)
            click.echo(f"# report written to {out_path}/report.csv", err=True)
    except Exception as exc:
        _fail(exc)


@main.command("export-graph")
@click.option("--nodes", type=int, default=1000, show_default=True, help="Network size N.")
@click.option("--m-attach", type=int, default=2, show_default=True, help="Edges per new node.")
@click.option("--p-triad", type=float, default=0.01, show_default=True, help="Triad formation probability.")
@click.option("--seed", type=int, default=0, show_default=True, help="Graph seed.")
@click.option("--out", type=str, default=None, help="Output file (default: stdout).")
@click.option("--server", type=str, default=None, help="Remote service URL (default: in-process).")
def cmd_export_graph(nodes, m_attach, p_triad, seed, out, server):
    """Generate a network and write it as an edge-list text file."""
    try:
        client = ServiceClient(server)
        resp = client.export_graph(
            {"n_nodes": nodes, "m_attach": m_attach, "p_triad": p_triad, "seed": seed}
        )
        if out:
            Path(out).write_text(resp["content"])
            click.echo(f"wrote {resp['nodes']} nodes / {resp['edges']} edges to {out}")
        else:
            click.echo(resp["content"], nl=False)
    except Exception as exc:
        _fail(exc)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def cmd_serve(host, port):
    """Start the HTTP service."""
    import uvicorn

    from polepi.service import create_app

    uvicorn.run(create_app(), host=host, port=port)


if __name__ == "__main__":
    main()
