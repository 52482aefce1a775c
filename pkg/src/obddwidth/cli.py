"""Command line entry point: ``obddwidth gen|compile|width|verify``."""
from __future__ import annotations

import json
import random
import re
import sys
from pathlib import Path

import click

from . import bounds
from .cnf import Cnf, emit_dimacs, parse_dimacs, primal_graph
from .config import CapExceeded, Caps
from .decomposition import incidence_path_decomposition, ordering_respecting_f
from .graphs import (
    clique_tree,
    cnf_of_graph,
    emit_graph,
    graph_to_dot,
    parse_graph,
    path_graph,
)
from .matching import matching_width_exact, verify_cltreemt
from .obdd import compile_cnf, obdd_to_dot


def _dump(obj, fmt="json"):
    if fmt == "json":
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"
    raise click.UsageError(f"format {fmt!r} is not available here")


def _caps(ctx) -> Caps:
    return ctx.obj["caps"]


def random_3cnf(num_vars: int, num_clauses: int, rng: random.Random) -> Cnf:
    """Distinct 3-clauses over distinct variables with random signs."""
    clauses = set()
    width = min(3, num_vars)
    limit = 50 * num_clauses
    while len(clauses) < num_clauses and limit:
        limit -= 1
        vs = rng.sample(range(1, num_vars + 1), width)
        clause = tuple(sorted((v if rng.random() < 0.5 else -v for v in vs), key=abs))
        clauses.add(clause)
    return Cnf.make(num_vars, sorted(clauses))


@click.group()
@click.option("--oracle-cap", type=int, default=None, help="Max variables for truth tables.")
@click.option("--subset-dp-cap", type=int, default=None, help="Max elements for subset DPs.")
@click.option("--exact-order-cap", type=int, default=None, help="Max variables for exact ordering.")
@click.pass_context
def main(ctx, oracle_cap, subset_dp_cap, exact_order_cap):
    """Generate hard CNF families, compile them to OBDDs and check size bounds."""
    env = Caps.from_env()
    caps = Caps(
        oracle=oracle_cap or env.oracle,
        subset_dp=subset_dp_cap or env.subset_dp,
        exact_order=exact_order_cap or env.exact_order,
    )
    if min(caps.oracle, caps.subset_dp, caps.exact_order) <= 0:
        raise click.BadParameter("caps must be positive")
    ctx.obj = {"caps": caps}


@main.command()
@click.option("--family", type=click.Choice(["ctree", "path", "dimacs"]), required=True)
@click.option("-r", type=int, default=None, help="Tree height for ctree.")
@click.option("-k", type=int, default=None, help="Clique size for ctree.")
@click.option("-n", type=int, default=None, help="Path length for path.")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Output prefix; writes PREFIX.cnf, PREFIX.json and, for graphs, PREFIX.graph and PREFIX.dot.")
@click.pass_context
def gen(ctx, family, r, k, n, input_path, out):
    """Write an instance as DIMACS plus JSON metadata."""
    graph = meta = None
    if family == "ctree":
        if r is None or k is None or r < 0 or k < 1:
            raise click.BadParameter("ctree needs -r >= 0 and -k >= 1")
        graph, meta = clique_tree(r, k)
        params = {"r": r, "k": k}
    elif family == "path":
        if n is None or n < 1:
            raise click.BadParameter("path needs -n >= 1")
        graph = path_graph(n)
        params = {"n": n}
    else:
        if input_path is None:
            raise click.BadParameter("dimacs needs --input")
        params = {"input": Path(input_path).name}
    f = cnf_of_graph(graph) if graph is not None else parse_dimacs(Path(input_path).read_bytes())
    info = {
        "family": family,
        "params": params,
        "num_vars": f.num_vars,
        "num_clauses": len(f.clauses),
        "cnf": f.to_json(),
        "clique_tree": meta.to_json() if meta is not None else None,
        "repro": bounds.repro_manifest(None, _caps(ctx)),
    }
    if out is None:
        click.echo(emit_dimacs(f), nl=False)
        return
    prefix = Path(out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    prefix.with_suffix(".cnf").write_text(emit_dimacs(f))
    prefix.with_suffix(".json").write_text(_dump(info))
    if graph is not None:
        prefix.with_suffix(".graph").write_text(emit_graph(graph))
        prefix.with_suffix(".dot").write_text(graph_to_dot(graph, meta))
    click.echo(_dump({"family": family, "params": params, "num_vars": f.num_vars,
                      "num_clauses": len(f.clauses)}), nl=False)


def _read_cnf(path):
    try:
        return parse_dimacs(Path(path).read_bytes())
    except ValueError as exc:
        raise click.ClickException(f"{path}: {exc}") from None


def _parse_order(spec: str, f: Cnf):
    path = Path(spec)
    text = path.read_text() if path.is_file() else spec
    # commas inside braces belong to edge-variable names such as X_{a,b}
    tokens = [t for t in re.split(r"\s+|,(?![^{]*\})", text) if t]
    try:
        order = [f.var_by_name(t) for t in tokens]
    except KeyError as exc:
        raise click.BadParameter(str(exc), param_hint="--order") from None
    if sorted(order) != list(range(1, f.num_vars + 1)):
        raise click.BadParameter("order is not a permutation of the variables", param_hint="--order")
    return tuple(order)


@main.command("compile")
@click.argument("cnf_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--order", "order_spec", default="respecting-f", show_default=True,
              help="'respecting-f', a comma list of variable names/indices, or a file holding one.")
@click.option("--uniform", is_flag=True, help="Keep the uniform (unreduced) layers.")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def compile_cmd(ctx, cnf_file, order_spec, uniform, dot_path):
    """Compile a CNF and report OBDD size against the layer bound."""
    caps = _caps(ctx)
    f = _read_cnf(cnf_file)
    try:
        pd, p = incidence_path_decomposition(f)
        if order_spec == "respecting-f":
            order = ordering_respecting_f(pd, f).order
        else:
            order = _parse_order(order_spec, f)
        d = compile_cnf(f, order, uniform=uniform, cap=caps.oracle)
        u = d if uniform else compile_cnf(f, order, uniform=True, cap=caps.oracle)
    except CapExceeded as exc:
        raise click.ClickException(str(exc)) from None
    limit = 1 + 2 ** (p + 1)
    respecting = order_spec == "respecting-f"
    result = {
        "order": list(order),
        "internal": d.internal_size,
        "total": d.size,
        "layers": d.layer_sizes(),
        "uniform_layers": u.layer_sizes(),
        "p": p,
        "layer_bound": limit,
        "pass": all(x <= limit for x in u.layer_sizes()) if respecting else None,
    }
    if dot_path:
        Path(dot_path).write_text(obdd_to_dot(d))
    click.echo(_dump(result), nl=False)
    if respecting and not result["pass"]:
        sys.exit(1)


@main.command()
@click.argument("path", type=click.Path(exists=True, dir_okay=False))
@click.option("--measure", type=click.Choice(["mw", "combined"]), default="mw", show_default=True)
@click.pass_context
def width(ctx, path, measure):
    """Exact matching width (graphs, or primal graphs of CNFs) or combined width (CNFs)."""
    caps = _caps(ctx)
    text = Path(path).read_text()
    is_cnf = path.endswith(".cnf") or text.lstrip().startswith(("p ", "c"))
    try:
        if measure == "mw":
            g = primal_graph(parse_dimacs(text)) if is_cnf else parse_graph(text)
            rep = matching_width_exact(g, caps.subset_dp)
            out = {"measure": "mw", **rep.to_json()}
        else:
            if not is_cnf:
                raise click.UsageError("combined width needs a CNF file")
            value, order = bounds.combined_width_exact(parse_dimacs(text), caps.subset_dp)
            out = {"measure": "combined", "value": value, "witness_order": list(order.order)}
    except CapExceeded as exc:
        raise click.ClickException(str(exc)) from None
    except ValueError as exc:
        raise click.ClickException(f"{path}: {exc}") from None
    click.echo(_dump(out), nl=False)


def _upper_instances(family, r, k, n, count, seed, input_path):
    if input_path:
        yield Path(input_path).name, _read_cnf(input_path)
    elif family == "ctree":
        yield f"F_{r},{k}", cnf_of_graph(clique_tree(r, k)[0])
    elif family == "path":
        yield f"CNF(P_{n})", cnf_of_graph(path_graph(n))
    else:
        rng = random.Random(seed)
        for i in range(count):
            nv = rng.randint(3, n or 12)
            yield f"random3cnf:{i:03d}", random_3cnf(nv, rng.randint(1, 2 * nv), rng)


@main.command()
@click.option("--suite", type=click.Choice(["upper", "lower", "cltreemt", "bookkeeping"]), required=True)
@click.option("-r", type=int, default=1, show_default=True)
@click.option("-k", type=int, default=1, show_default=True)
@click.option("-n", type=int, default=None, help="Path length, or max variables for random CNFs.")
@click.option("--family", type=click.Choice(["ctree", "path", "random"]), default="ctree", show_default=True)
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--mode", type=click.Choice(["exact", "per-order", "sampled", "auto"]), default=None)
@click.option("--orders", type=int, default=100, show_default=True, help="Random orders or permutations to sample.")
@click.option("--count", type=int, default=50, show_default=True, help="Random CNFs for --family random.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@click.pass_context
def verify(ctx, suite, r, k, n, family, input_path, mode, orders, count, seed, fmt, out):
    """Run a bound-checking suite; exit status 0 iff every check passes."""
    caps = _caps(ctx)
    reports = []
    try:
        if suite == "upper":
            if family == "path" and n is None:
                raise click.BadParameter("path family needs -n")
            for name, f in _upper_instances(family, r, k, n, count, seed, input_path):
                rep = bounds.verify_upper_bound(f, instance=name, cap=caps.oracle)
                rep.repro = bounds.repro_manifest(seed, caps)
                reports.append(rep)
        elif suite == "lower":
            rep = bounds.verify_lower_bound(r, k, mode or "per-order", orders, seed, caps=caps)
            reports.append(rep)
        elif suite == "cltreemt":
            res = verify_cltreemt(r, k, samples=orders, seed=seed, mode=mode or "auto", cap=caps.subset_dp)
            reports.append(bounds.BoundReport(
                f"cltreemt:{r},{k}",
                params={"r": r, "k": k, "mode": res.mode},
                measured={"value": res.value, "permutations": res.permutations},
                formulas={"bound": res.bound, "bound_real": r * k / 2},
                checks={"mw_at_least_rk_half": res.passed},
                repro=bounds.repro_manifest(seed, caps),
            ))
        else:
            rep = bounds.bookkeeping_report(r, k)
            rep.repro = bounds.repro_manifest(seed, caps)
            reports.append(rep)
    except CapExceeded as exc:
        raise click.ClickException(str(exc)) from None
    text = bounds.reports_json(reports) if fmt == "json" else bounds.reports_csv(reports)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    for rep in reports:
        for w in rep.warnings:
            click.echo(f"warning: {rep.instance}: {w}", err=True)
    failed = [rep.instance for rep in reports if not rep.passed]
    if failed:
        click.echo("failed: " + ", ".join(failed), err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
