"""Command-line front end.

Every command writes data to stdout (or ``--output``) as canonical JSON or
CSV and diagnostics to stderr.  Exit codes: 0 success, 1 a verification
failed, 2 invalid configuration, 3 computation error.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import product
from typing import Iterable, List, Optional, Sequence, Tuple

import click

from . import hyperbolic, kernels, stablegraphs, trengine
from .coeffring import EvenPoly

EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_COMPUTE = 3

SUITES = ("oracle-triangle", "airy", "integrated-symmetry", "scaling", "symmetry")


class ComputationError(click.ClickException):
    exit_code = EXIT_COMPUTE


class VerificationFailed(click.ClickException):
    exit_code = EXIT_FAIL


# ---------------------------------------------------------------------------
# config plumbing


def _load_config(ctx: click.Context, param, value):
    if value is None:
        return value
    try:
        with open(value) as fh:
            data = json.load(fh)
    except (OSError, ValueError) as exc:
        raise click.BadParameter(f"cannot read config: {exc}", ctx=ctx, param=param)
    if not isinstance(data, dict):
        raise click.BadParameter("config must be a JSON object", ctx=ctx, param=param)
    names = {"format": "fmt", "twist": "twist_spec", "suite": "suites"}
    ctx.default_map = {names.get(k, k.replace("-", "_")): v for k, v in data.items()}
    return value


def config_option(f):
    return click.option(
        "--config",
        type=click.Path(dir_okay=False),
        callback=_load_config,
        is_eager=True,
        expose_value=False,
        help="JSON file of option defaults; flags override it.",
    )(f)


def output_options(f):
    f = click.option("--output", type=click.Path(dir_okay=False), default=None, help="Write here instead of stdout.")(f)
    f = click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)(f)
    return f


def _threads() -> int:
    raw = os.environ.get("MODULI_THREADS", "")
    if not raw:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise click.UsageError(f"MODULI_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise click.UsageError("MODULI_THREADS must be positive")
    return n


def _pmap(fn, items: Sequence):
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        return list(pool.map(fn, items))


def parse_gn(values: Iterable[str]) -> List[Tuple[int, int]]:
    out = []
    for v in values:
        try:
            g, n = (int(x) for x in str(v).split(","))
        except ValueError:
            raise click.BadParameter(f"expected g,n but got {v!r}", param_hint="--gn")
        if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
            raise click.BadParameter(f"(g,n)=({g},{n}) is not stable", param_hint="--gn")
        out.append((g, n))
    return out


def cells(gn: Sequence[str], max_complexity: Optional[int], min_n: int = 0) -> List[Tuple[int, int]]:
    out = parse_gn(gn)
    for g, n in out:
        if n < min_n:
            raise click.BadParameter(f"(g,n)=({g},{n}) needs at least {min_n} boundary", param_hint="--gn")
    if max_complexity is not None:
        if max_complexity < 0:
            raise click.BadParameter("must be nonnegative", param_hint="--max-complexity")
        out += trengine.stable_range(max_complexity)
    return sorted({c for c in out if c[1] >= min_n})


def parse_kernel(spec: str) -> kernels.KernelFamily:
    s = spec.strip().lower()
    if s in ("mirzakhani", "m"):
        return kernels.Mirzakhani()
    if s in ("kontsevich", "k"):
        return kernels.Kontsevich()
    if s.startswith("beta:"):
        try:
            b = Fraction(s[5:])
        except (ValueError, ZeroDivisionError):
            raise click.BadParameter(f"bad beta in {spec!r}", param_hint="--kernel")
        if b <= 0:
            raise click.BadParameter("beta must be positive", param_hint="--kernel")
        return kernels.BetaScaled(b)
    raise click.BadParameter(f"unknown kernel {spec!r}", param_hint="--kernel")


def parse_twist(spec: str) -> kernels.MomentSpec:
    s = spec.strip().lower()
    try:
        if s in ("formal", "u"):
            return kernels.FormalMoments()
        if s.startswith("indicator:"):
            return kernels.Indicator(Fraction(s.split(":", 1)[1]))
        if s.startswith("exponential:"):
            return kernels.Exponential(Fraction(s.split(":", 1)[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(str(exc), param_hint="--twist")
    raise click.BadParameter(f"unknown twist {spec!r}", param_hint="--twist")


# ---------------------------------------------------------------------------
# output


def _cell(v):
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True, separators=(",", ":"))
    return v


def emit(payload, rows: List[dict], fmt: str, output: Optional[str], columns: Sequence[str]) -> None:
    if fmt == "json":
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
    else:
        buf = io.StringIO()
        cols = list(columns)
        for r in rows:
            cols += [k for k in r if k not in cols]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(r.get(k, "")) for k in cols})
        text = buf.getvalue()
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def numeric_rows(g: int, n: int, p: EvenPoly) -> List[dict]:
    rows = []
    for d, c in p.sorted_items():
        if c.has_symbols():
            raise ComputationError("--numeric needs numeric twist moments")
        rows.append({"g": g, "n": n, "d": list(d), "value": float(c.evaluate(math.pi ** 2))})
    return rows


def poly_rows(g: int, n: int, p: EvenPoly, numeric: bool) -> List[dict]:
    return numeric_rows(g, n, p) if numeric else list(trengine.volume_rows(g, n, p))


def _guard(fn):
    """Map library errors onto the exit-code contract."""
    try:
        return fn()
    except click.ClickException:
        raise
    except (trengine.CapExhausted, ArithmeticError, RecursionError) as exc:
        raise ComputationError(str(exc))
    except (ValueError, KeyError, TypeError, FileNotFoundError) as exc:
        raise click.UsageError(str(exc))


# ---------------------------------------------------------------------------
# commands


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Volumes of moduli spaces, their twists and checks."""


@main.command()
@config_option
@click.option("--kernel", default="mirzakhani", show_default=True, help="mirzakhani, kontsevich or beta:<rational>.")
@click.option("--gn", multiple=True, help="A cell g,n; repeatable.")
@click.option("--max-complexity", type=int, default=None, help="Add all stable cells with 2g-2+n up to this.")
@click.option("--numeric", is_flag=True, help="Evaluate coefficients as floats.")
@output_options
def volumes(kernel, gn, max_complexity, numeric, fmt, output):
    """Volume polynomials for a range of (g,n)."""
    fam = parse_kernel(kernel)
    todo = cells(gn, max_complexity, min_n=1)
    polys = _guard(lambda: _pmap(lambda c: trengine.volume(c[0], c[1], fam), todo))
    rows = [r for (g, n), p in zip(todo, polys) for r in poly_rows(g, n, p, numeric)]
    payload = {
        "kernel": fam.to_json(),
        "volumes": [{"g": g, "n": n, "poly": str(p)} for (g, n), p in zip(todo, polys)],
        "rows": rows,
    }
    emit(payload, rows, fmt, output, ["g", "n", "d", "pi2", "num", "den", "value"])


@main.command()
@config_option
@click.option("--gn", multiple=True)
@click.option("--max-complexity", type=int, default=None)
@output_options
def psi(gn, max_complexity, fmt, output):
    """Psi-class intersection numbers <tau_d1 ... tau_dn>_g."""
    todo = cells(gn, max_complexity, min_n=1)
    tables = _guard(lambda: _pmap(lambda c: trengine.psi_intersections(*c), todo))
    rows = []
    for (g, n), t in zip(todo, tables):
        for d, q in sorted(t.items()):
            rows.append({"g": g, "n": n, "d": list(d), "num": str(q.numerator), "den": str(q.denominator)})
    emit({"rows": rows}, rows, fmt, output, ["g", "n", "d", "num", "den"])


@main.command("twist")
@config_option
@click.option("--kernel", default="mirzakhani", show_default=True)
@click.option("--twist", "twist_spec", default="formal", show_default=True, help="formal, indicator:<H> or exponential:<rate>.")
@click.option("--gn", multiple=True)
@click.option("--max-complexity", type=int, default=None)
@click.option("--method", type=click.Choice(["recursion", "graphs"]), default="recursion", show_default=True)
@click.option("--numeric", is_flag=True)
@output_options
def twist_cmd(kernel, twist_spec, gn, max_complexity, method, numeric, fmt, output):
    """Twisted volumes, by twisted recursion or by the stable-graph sum."""
    fam = parse_kernel(kernel)
    f = parse_twist(twist_spec)
    todo = cells(gn, max_complexity, min_n=1)

    def one(c):
        if method == "graphs":
            return stablegraphs.graph_sum_volume(c[0], c[1], fam, f)
        return trengine.twisted_volume(c[0], c[1], fam, f)

    polys = _guard(lambda: _pmap(one, todo))
    rows = [r for (g, n), p in zip(todo, polys) for r in poly_rows(g, n, p, numeric)]
    emit({"kernel": fam.to_json(), "twist": f.to_json(), "rows": rows}, rows, fmt, output, ["g", "n", "d", "pi2", "num", "den", "sym", "value"])


@main.command()
@config_option
@click.option("--gn", multiple=True)
@click.option("--max-complexity", type=int, default=None)
@output_options
def graphs(gn, max_complexity, fmt, output):
    """Stable graphs with automorphism orders."""
    todo = cells(gn, max_complexity)
    found = _guard(lambda: _pmap(lambda c: stablegraphs.enumerate_graphs(*c), todo))
    rows = []
    for (g, n), gs in zip(todo, found):
        for i, G in enumerate(gs):
            rows.append(dict(G.to_json(), g=g, n=n, index=i))
    emit({"rows": rows}, rows, fmt, output, ["g", "n", "index", "genera", "edges", "legs", "aut"])


def _parse_fn(value: str) -> hyperbolic.FNTorus:
    try:
        parts = [float(x) for x in value.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected length,twist[,boundary], got {value!r}", param_hint="--fn")
    if len(parts) == 2:
        parts.append(1.0)
    if len(parts) != 3:
        raise click.BadParameter("expected length,twist[,boundary]", param_hint="--fn")
    try:
        return hyperbolic.FNTorus(*parts)
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--fn")


@main.command()
@config_option
@click.option("--fn", "fn", default="1.0,0.0", show_default=True, help="Fenchel-Nielsen length,twist[,boundary]; boundary defaults to 1.")
@click.option("--cutoff", type=float, default=25.0, show_default=True)
@click.option("--kernel", type=click.Choice(["mirzakhani", "kontsevich"]), default="mirzakhani", show_default=True)
@output_options
def mcshane(fn, cutoff, kernel, fmt, output):
    """Partial sums of C(L, l, l) over simple closed geodesics on a one-holed torus."""
    t = _parse_fn(fn)
    rows = _guard(lambda: hyperbolic.mcshane_partial_sums(t, cutoff, kernel))
    out = [{"p": p, "q": q, "length": ell, "partial_sum": s} for p, q, ell, s in rows]
    total = out[-1]["partial_sum"] if out else 0.0
    payload = {
        "torus": {"length": t.length, "twist": t.twist, "boundary": t.boundary},
        "cutoff": cutoff,
        "kernel": kernel,
        "sum": total,
        "rows": out,
    }
    emit(payload, out, fmt, output, ["p", "q", "length", "partial_sum"])


def _parse_labels(value: str, n: int, alg) -> List[int]:
    toks = [x.strip() for x in value.split(",") if x.strip() != ""]
    if len(toks) != n:
        raise click.BadParameter(f"need {n} labels, got {len(toks)}", param_hint="--labels")
    out = []
    for tok in toks:
        if tok not in alg.labels:
            raise click.BadParameter(f"unknown label {tok!r}", param_hint="--labels")
        out.append(alg.labels.index(tok))
    return out


def _load_algebra(data: Optional[str], level: Optional[int]):
    from .tqft import from_modular_data, load_modular_data

    if data is None and level is None:
        level = 1
    if data is not None and not os.path.exists(data):
        # bare file names refer to the bundled data
        stem = os.path.basename(data)
        if stem.startswith("su2_k") and stem.endswith(".json"):
            try:
                level = int(stem[5:-5])
                data = None
            except ValueError:
                pass
    try:
        raw = load_modular_data(path=data, k=level)
        return from_modular_data(raw)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise click.BadParameter(f"bad modular data: {exc}", param_hint="--data")


@main.command()
@config_option
@click.option("--data", type=str, default=None, help="Modular data JSON; su2_k<k>.json names the bundled files.")
@click.option("--level", type=int, default=None, help="Bundled su(2) level.")
@click.option("--gn", multiple=True, required=True)
@click.option("--labels", default=None, help="Comma-separated boundary labels; all tuples if omitted.")
@output_options
def verlinde(data, level, gn, labels, fmt, output):
    """Ranks of conformal-block bundles by the Verlinde formula."""
    from .tqft import verlinde_rank

    alg = _load_algebra(data, level)
    todo = parse_gn(gn)
    jobs = []
    for g, n in todo:
        if labels is not None:
            jobs.append((g, n, tuple(_parse_labels(labels, n, alg))))
        else:
            jobs += [(g, n, lam) for lam in product(range(alg.dim), repeat=n)]
    ranks = _guard(lambda: _pmap(lambda j: verlinde_rank(alg, j[0], j[1], j[2]), jobs))
    rows = [{"g": g, "n": n, "labels": [alg.labels[x] for x in lam], "rank": r} for (g, n, lam), r in zip(jobs, ranks)]
    emit({"algebra": alg.name, "rows": rows}, rows, fmt, output, ["g", "n", "labels", "rank"])


def _airy_source(kernel: str, tensors: Optional[str], cap: int) -> trengine.AiryTensors:
    if tensors is not None:
        try:
            with open(tensors) as fh:
                return trengine.AiryTensors.from_json(json.load(fh))
        except (OSError, ValueError, KeyError, TypeError) as exc:
            raise click.BadParameter(f"cannot read tensors: {exc}", param_hint="--tensors")
    return _guard(lambda: trengine.airy_tensors(parse_kernel(kernel), cap))


@main.command("airy-check")
@config_option
@click.option("--kernel", default="mirzakhani", show_default=True)
@click.option("--tensors", type=click.Path(dir_okay=False), default=None, help="Tensor file instead of a kernel.")
@click.option("--cap", type=int, default=10, show_default=True)
@click.option("--window", type=int, default=3, show_default=True)
@click.option("--export", type=click.Path(dir_okay=False), default=None, help="Also write the tensors here.")
@output_options
def airy_check(kernel, tensors, cap, window, export, fmt, output):
    """Check the quantum Airy structure relations on a finite window."""
    t = _airy_source(kernel, tensors, cap)
    if export:
        with open(export, "w") as fh:
            json.dump(t.to_json(), fh, sort_keys=True, indent=1)
    rep = _guard(lambda: trengine.check_airy_relations(t, window))
    payload = dict(rep.to_json(), label=t.label, window=window, failing=rep.failing())
    rows = [{"relation": name, "violations": len(r)} for name, r in rep.residuals.items()]
    emit(payload, rows, fmt, output, ["relation", "violations"])
    if not rep.passed:
        raise VerificationFailed("relations failed: " + ", ".join(rep.failing()))


# ---------------------------------------------------------------------------
# verify suites


def suite_oracle_triangle(fam, max_complexity: int, cap: int = 10, **_) -> dict:
    cells_ = [c for c in trengine.stable_range(max_complexity) if c[1] >= 1]
    t = trengine.airy_tensors(fam, cap)
    bad = []
    for g, n in cells_:
        v = trengine.volume(g, n, fam)
        ks = trengine.ks_recursion(t, g, n)
        if {d: c for d, c in v.items()} != ks:
            bad.append(f"ks({g},{n})")
        f = kernels.FormalMoments()
        if stablegraphs.graph_sum_volume(g, n, fam, f) != trengine.twisted_volume(g, n, fam, f):
            bad.append(f"graphs({g},{n})")
    return {"passed": not bad, "failing": bad, "cells": [list(c) for c in cells_]}


def suite_airy(fam, tensors=None, cap: int = 10, window: int = 3, **_) -> dict:
    t = tensors if tensors is not None else trengine.airy_tensors(fam, cap)
    rep = trengine.check_airy_relations(t, window)
    bad = rep.failing() + t.check_declared_symmetries()
    return {"passed": not bad, "failing": bad}


def suite_integrated(fam, window: int = 3, **_) -> dict:
    res = trengine.check_integrated_symmetry(fam, window)
    bad = [name for name, r in res.items() if r]
    return {"passed": not bad, "failing": bad}


def scaling_residuals(g: int, n: int, betas: Sequence[Fraction]) -> List[str]:
    M = trengine.volume(g, n, kernels.Mirzakhani())
    bad = []
    for b in betas:
        lhs = trengine.volume(g, n, kernels.BetaScaled(b))
        rhs = M.rescale(b).scale(b ** -(6 * g - 6 + 2 * n))
        if lhs != rhs:
            bad.append(f"beta={b} at ({g},{n})")
    if M.top_degree_part() != trengine.volume(g, n, kernels.Kontsevich()):
        bad.append(f"top degree at ({g},{n})")
    return bad


SCALING_BETAS = tuple(Fraction(p, q) for p, q in [(2, 1), (3, 1), (1, 2), (5, 7), (7, 3), (11, 5), (13, 1), (1, 9)])


def suite_scaling(fam, max_complexity: int, **_) -> dict:
    bad = []
    for g, n in trengine.stable_range(max_complexity):
        if n >= 1:
            bad += scaling_residuals(g, n, SCALING_BETAS)
    return {"passed": not bad, "failing": bad}


def suite_symmetry(fam, max_complexity: int, **_) -> dict:
    bad = [f"({g},{n})" for g, n in trengine.stable_range(max_complexity) if n >= 1 and not trengine.volume(g, n, fam).is_symmetric()]
    return {"passed": not bad, "failing": bad}


SUITE_FUNCS = {
    "oracle-triangle": suite_oracle_triangle,
    "airy": suite_airy,
    "integrated-symmetry": suite_integrated,
    "scaling": suite_scaling,
    "symmetry": suite_symmetry,
}


@main.command()
@config_option
@click.option("--suite", "suites", multiple=True, type=click.Choice(SUITES), help="Repeatable; all suites if omitted.")
@click.option("--kernel", default="mirzakhani", show_default=True)
@click.option("--tensors", type=click.Path(dir_okay=False), default=None, help="Tensor file for the airy suite.")
@click.option("--max-complexity", type=int, default=3, show_default=True)
@click.option("--cap", type=int, default=10, show_default=True)
@click.option("--window", type=int, default=3, show_default=True)
@output_options
def verify(suites, kernel, tensors, max_complexity, cap, window, fmt, output):
    """Run invariant suites and report pass/fail per suite."""
    fam = parse_kernel(kernel)
    if max_complexity < 0:
        raise click.BadParameter("must be nonnegative", param_hint="--max-complexity")
    t = _airy_source(kernel, tensors, cap) if tensors is not None else None
    names = list(suites) or list(SUITES)
    if t is not None and not suites:
        names = ["airy"]

    def run(name):
        return _guard(lambda: SUITE_FUNCS[name](fam, max_complexity=max_complexity, tensors=t, cap=cap, window=window))

    results = dict(zip(names, _pmap(run, names)))
    passed = all(r["passed"] for r in results.values())
    payload = {"passed": passed, "suites": results}
    rows = [{"suite": k, "passed": v["passed"], "failing": v["failing"]} for k, v in results.items()]
    emit(payload, rows, fmt, output, ["suite", "passed", "failing"])
    if not passed:
        failing = [f"{k}: {', '.join(v['failing'])}" for k, v in results.items() if not v["passed"]]
        raise VerificationFailed("; ".join(failing))


if __name__ == "__main__":  # pragma: no cover
    main()
