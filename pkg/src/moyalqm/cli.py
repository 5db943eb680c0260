"""Batch front end: Wigner grids, extrema and negativity tables, hydrogen report."""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
import time
from importlib import metadata, resources
from pathlib import Path

import numpy as np

from . import hydrogen as hyd
from .oscillator import FockLabel
from .perturbation import EPSILON_PRESETS, HamiltonianSpec, perturbed_state
from .quadrature import THREADS_ENV, Quadrature, integrate, thread_count
from .wigner import GridSpec, evaluate_grid, extrema, negativity_detail, wigner_perturbed

log = logging.getLogger("moyalqm")

NORM_TOL = 5e-3
CONVERGENCE_TOL = 5e-3


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# helpers


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def csv_text(header: list, rows: list) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(x) for x in r])
    return buf.getvalue()


def parse_label(text: str) -> FockLabel:
    """``"4"`` means shell 4 split evenly as ``(2, 2)``; ``"1,2"`` is explicit."""
    try:
        parts = [int(t) for t in text.replace("(", "").replace(")", "").split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid state selector {text!r}") from exc
    if len(parts) == 1:
        n = parts[0]
        if n < 0 or n % 2:
            raise UsageError(f"state selector {n} must be an even non-negative shell index or 'nx,ny'")
        return FockLabel(n // 2, n // 2)
    if len(parts) == 2 and min(parts) >= 0:
        return FockLabel(*parts)
    raise UsageError(f"invalid state selector {text!r}")


def parse_slice(text: str) -> dict:
    """``"q_y=0,p_y=0"`` -> ``{2: 0.0, 3: 0.0}`` keyed by phase-variable index."""
    names = ("q_x", "p_x", "q_y", "p_y")
    fixed = {}
    for item in text.split(","):
        if not item.strip():
            continue
        name, _, val = item.partition("=")
        if name.strip() not in names:
            raise UsageError(f"unknown slice variable {name.strip()!r}")
        try:
            fixed[names.index(name.strip())] = float(val)
        except ValueError as exc:
            raise UsageError(f"invalid slice value in {item!r}") from exc
    if len(fixed) == len(names):
        raise UsageError("at least one variable must be left free")
    return fixed


def parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid number list {text!r}") from exc


def parse_ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(f"invalid integer list {text!r}") from exc


def parse_star_order(text: str):
    if text in ("exact", "none", "None"):
        return None
    try:
        k = int(text)
    except ValueError as exc:
        raise UsageError(f"--star-order must be an integer or 'exact', got {text!r}") from exc
    if k < 0:
        raise UsageError("--star-order must be non-negative")
    return k


def published_tables() -> dict:
    return json.loads(resources.files("moyalqm").joinpath("data/published_tables.json").read_text())


class Run:
    """Collects outputs, checks and the manifest of one command."""

    def __init__(self, args, command: str):
        self.args = args
        self.command = command
        self.out = Path(args.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        self.start = time.perf_counter()
        self.files: list[Path] = []
        self.checks: list[dict] = []
        self.trends: list[dict] = []

    def write(self, name: str, text: str) -> Path:
        path = self.out / name
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        self.files.append(path)
        return path

    def table(self, stem: str, header: list, rows: list):
        if self.args.format == "csv":
            self.write(stem + ".csv", csv_text(header, rows))
        else:
            recs = [{h: (float(v) if isinstance(v, (float, np.floating)) else v) for h, v in zip(header, r)} for r in rows]
            self.write(stem + ".json", json.dumps(recs, indent=1, sort_keys=True) + "\n")

    def check(self, name: str, ok: bool, **detail):
        self.checks.append({"name": name, "ok": bool(ok), **{k: _jsonable(v) for k, v in detail.items()}})

    def trend(self, name: str, ok: bool, **detail):
        self.trends.append({"name": name, "holds": bool(ok), **{k: _jsonable(v) for k, v in detail.items()}})

    def finish(self) -> int:
        summary = {"command": self.command, "checks": self.checks, "trends": self.trends}
        self.write("checks.json", json.dumps(summary, indent=1, sort_keys=True) + "\n")
        manifest = {
            "command": self.command,
            "parameters": {k: _jsonable(v) for k, v in sorted(vars(self.args).items()) if k not in ("func",)},
            "threads": thread_count(),
            "artifacts": [
                {"path": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()} for p in self.files
            ],
            "version": _version(),
            "wall_time_s": time.perf_counter() - self.start,
        }
        (self.out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        ok = all(c["ok"] for c in self.checks)
        for c in self.checks:
            log.info("check %-40s %s", c["name"], "ok" if c["ok"] else "FAILED")
        for t in self.trends:
            log.info("trend %-40s %s", t["name"], "holds" if t["holds"] else "does not hold")
        return 0 if ok else 1


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, FockLabel):
        return [v.nx, v.ny]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def _spec(args, eps: float) -> HamiltonianSpec:
    return HamiltonianSpec(lam=args.lam, epsilon=eps, policy=args.policy)


def _state_wigner(args, label: FockLabel, eps: float, order: int):
    state = perturbed_state(_spec(args, eps), label, order)
    return state, wigner_perturbed(state, parse_star_order(args.star_order))


def _nondecreasing(xs, strict=False) -> bool:
    return all((b > a) if strict else (b >= a) for a, b in zip(xs, xs[1:]))


# ----------------------------------------------------------------------------
# commands


def cmd_wigner_grid(args) -> int:
    label = parse_label(args.state)
    eps = parse_floats(args.epsilon)
    if len(eps) != 1:
        raise UsageError("wigner-grid takes a single --epsilon value")
    fixed = parse_slice(args.slice)
    parse_star_order(args.star_order)
    if args.grid < 2:
        raise UsageError("--grid needs at least 2 points")
    run = Run(args, "wigner-grid")
    state, f = _state_wigner(args, label, eps[0], args.order)
    grid = GridSpec.auto(f, args.grid, fixed)
    total = integrate(f).real
    trap = integrate(f, Quadrature.trapezoid(args.grid)).real
    meta = {
        "state": [label.nx, label.ny],
        "epsilon": eps[0],
        "lambda": args.lam,
        "order": args.order,
        "star_order": args.star_order,
        "normalization": total,
        "normalization_trapezoid": trap,
        "slice_convention": "unlisted variables are sampled; fixed ones are held at the given values",
    }
    wg = evaluate_grid(f, grid, meta)
    stem = f"wigner_n{label.nx}-{label.ny}_eps{eps[0]:g}_order{args.order}"
    if args.format == "csv":
        run.write(stem + ".csv", wg.to_csv())
    run.write(stem + ".json", wg.sidecar())
    run.check("normalization exact", abs(total - 1) <= NORM_TOL, value=total)
    run.check("normalization trapezoid", abs(trap - 1) <= NORM_TOL, value=trap)
    run.check("imaginary residue", wg.meta["imag_residue"] < 1e-8, value=wg.meta["imag_residue"])
    return run.finish()


def _diff_rows(ours: dict, table: list, keys: tuple, fields: tuple) -> list:
    rows = []
    for rec in table:
        key = tuple(rec[k] for k in keys)
        if key not in ours:
            continue
        for fld in fields:
            ref, got = rec[fld], ours[key][fld]
            rel = (got - ref) / abs(ref) if ref else float("nan")
            rows.append(list(key) + [fld, got, ref, rel, abs(got - ref) <= 0.05])
    return rows


def cmd_extrema_table(args) -> int:
    if args.order not in (1, 2):
        raise UsageError("extrema-table needs --order 1 or 2")
    ns = parse_ints(args.n)
    eps = parse_floats(args.epsilon)
    labels = {n: parse_label(str(n)) for n in ns}
    parse_star_order(args.star_order)
    run = Run(args, "extrema-table")
    rows, ours = [], {}
    for n in ns:
        label = labels[n]
        for e in eps:
            state, f = _state_wigner(args, label, e, args.order)
            ex = extrema(f)
            norm2 = float(sum(abs(c) ** 2 for c in state.fock_vector().values()))
            rows.append([n, label.nx, label.ny, e, ex.max, ex.min, norm2, norm2 * ex.max, norm2 * ex.min])
            ours[(n, e)] = {"max": ex.max, "min": ex.min}
            run.check(f"finite extrema n={n} eps={e:g}", np.isfinite(ex.max) and np.isfinite(ex.min))
    header = ["n", "nx", "ny", "epsilon", "max", "min", "norm2", "raw_max", "raw_min"]
    run.table(f"extrema_order{args.order}", header, rows)
    ref = published_tables()["extrema"][str(args.order)]
    diff = _diff_rows(ours, ref, ("n", "epsilon"), ("max", "min"))
    run.table(f"extrema_order{args.order}_diff", ["n", "epsilon", "field", "ours", "published", "rel_dev", "within_0.05"], diff)
    for n in ns:
        mx = [ours[(n, e)]["max"] for e in eps]
        mn = [-ours[(n, e)]["min"] for e in eps]
        run.trend(f"max nondecreasing in eps n={n}", _nondecreasing(mx), values=mx)
        run.trend(f"|min| nondecreasing in eps n={n}", _nondecreasing(mn), values=mn)
        if n >= 2:
            run.trend(f"max>0>min n={n}", all(ours[(n, e)]["max"] > 0 > ours[(n, e)]["min"] for e in eps))
    return run.finish()


def cmd_negativity(args) -> int:
    ns = parse_ints(args.n) if args.n else None
    k = parse_star_order(args.star_order)
    if args.system == "hydrogen1d":
        ns = ns or list(range(1, 10))
        if any(n < 1 for n in ns):
            raise UsageError("hydrogen levels start at n=1")
    else:
        ns = ns or [0, 2, 4, 6, 8]
        eps = parse_floats(args.epsilon)
        labels = {n: parse_label(str(n)) for n in ns}
    run = Run(args, "negativity")
    rows, ours = [], {}
    if args.system == "hydrogen1d":
        for n in ns:
            res = hyd.hydrogen_negativity(n, 2 if k is None else k, args.Z, args.frame, args.mode)
            rows.append([args.system, n, "", res.eta, res.delta])
            ours[(n,)] = {"eta": res.eta}
            run.check(f"converged n={n}", res.delta < CONVERGENCE_TOL, delta=res.delta)
        etas = [ours[(n,)]["eta"] for n in ns]
        run.trend("eta nondecreasing in n", _nondecreasing(etas), values=etas)
        ref = published_tables()["negativity"]["hydrogen1d"]
        diff = _diff_rows(ours, ref, ("n",), ("eta",))
    else:
        for n in ns:
            label = labels[n]
            for e in eps:
                _, f = _state_wigner(args, label, e, args.order)
                res = negativity_detail(f, Quadrature.trapezoid(args.grid))
                rows.append([args.system, n, e, res.eta, res.delta])
                ours[(n, e)] = {"eta": res.eta}
                run.check(f"converged n={n} eps={e:g}", res.delta < CONVERGENCE_TOL, delta=res.delta)
            etas = [ours[(n, e)]["eta"] for e in eps]
            run.trend(f"eta increasing in eps n={n}", _nondecreasing(etas, strict=True), values=etas)
        ref = published_tables()["negativity"]["henon-heiles"]
        diff = _diff_rows(ours, ref, ("n", "epsilon"), ("eta",))
    run.table("negativity", ["system", "n", "epsilon", "eta", "delta"], rows)
    keys = ["n"] if args.system == "hydrogen1d" else ["n", "epsilon"]
    run.table("negativity_diff", keys + ["field", "ours", "published", "rel_dev", "within_0.05"], diff)
    return run.finish()


def cmd_hydrogen(args) -> int:
    ns = parse_ints(args.n)
    if any(n < 1 for n in ns):
        raise UsageError("hydrogen levels start at n=1")
    if args.Z < 1:
        raise UsageError("--Z must be a positive integer")
    run = Run(args, "hydrogen")
    rows = []
    for n in ns:
        ha, ev = hyd.hydrogen_energy(n, args.Z)
        ref = -13.605693122994 * args.Z ** 2 / n ** 2
        res = hyd.eigen_residual(n, args.Z)
        rows.append([n, args.Z, ha, ev, res])
        run.check(f"energy n={n}", abs(ev - ref) <= 1e-3 * abs(ref), eV=ev)
        run.check(f"eigen residual n={n}", res <= 1e-8, residual=res)
    run.table("hydrogen_energies", ["n", "Z", "hartree", "eV", "eigen_residual"], rows)
    br = hyd.bohr_radius_check(args.Z)
    run.check("bohr radius", abs(br.radial - 1.0 / args.Z) <= 1e-3, radial=br.radial, lab=br.lab)
    run.check("density rises from the origin", br.density_at_origin < br.density_at_peak)
    shape = hyd.shape_residual(hyd.hydrogen_wigner(1, 2, args.Z, "gauge"))
    lab_shape = hyd.shape_residual(hyd.hydrogen_wigner(1, 2, args.Z, "lab"))
    run.check("ground-state Wigner shape", shape <= 1e-10, gauge=shape, lab=lab_shape)
    run.table(
        "hydrogen_checks",
        ["quantity", "value"],
        [["bohr_radius_radial", br.radial], ["bohr_radius_lab", br.lab], ["shape_residual_gauge", shape], ["shape_residual_lab", lab_shape]],
    )
    return run.finish()


# ----------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="moyalqm", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, order_default=1):
        sp.add_argument("--epsilon", default=",".join(f"{e:g}" for e in EPSILON_PRESETS), help="comma-separated epsilon values")
        sp.add_argument("--lambda", dest="lam", type=float, default=1.0)
        sp.add_argument("--order", type=int, choices=(0, 1, 2), default=order_default)
        sp.add_argument("--star-order", default="exact", help="Moyal truncation order or 'exact'")
        sp.add_argument("--grid", type=int, default=64, help="points per axis")
        sp.add_argument("--out-dir", default=".")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--policy", choices=("paper-faithful", "strict"), default="paper-faithful")

    g = sub.add_parser("wigner-grid", help="sample one Wigner function on a grid")
    common(g)
    g.add_argument("--state", default="0", help="even shell index n -> (n/2, n/2), or 'nx,ny'")
    g.add_argument("--slice", default="q_y=0,p_y=0", help="fixed variables, e.g. 'q_y=0,p_y=0'")
    g.set_defaults(func=cmd_wigner_grid, epsilon="0")

    e = sub.add_parser("extrema-table", help="max/min of first- or second-order Wigner functions")
    common(e)
    e.add_argument("--n", default="0,2,4,6,8", help="comma-separated even shell indices")
    e.set_defaults(func=cmd_extrema_table)

    ng = sub.add_parser("negativity", help="negativity indicator table")
    common(ng)
    ng.add_argument("--system", choices=("hydrogen1d", "henon-heiles"), default="henon-heiles")
    ng.add_argument("--n", default=None)
    ng.add_argument("--Z", type=int, default=1)
    ng.add_argument("--frame", choices=hyd.FRAMES, default="lab")
    ng.add_argument("--mode", choices=("positive", "both"), default="positive")
    ng.set_defaults(func=cmd_negativity)

    h = sub.add_parser("hydrogen", help="energies, Bohr radius and Wigner shape checks")
    h.add_argument("--n", default="1")
    h.add_argument("--Z", type=int, default=1)
    h.add_argument("--out-dir", default=".")
    h.add_argument("--format", choices=("csv", "json"), default="csv")
    h.set_defaults(func=cmd_hydrogen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if os.environ.get(THREADS_ENV):
        log.info("threads: %d", thread_count())
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"moyalqm: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
