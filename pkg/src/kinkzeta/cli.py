"""Command-line front end.

    kinkzeta COMMAND [flags]

Commands: profile, energy, resolvent, spectrum, heat-trace, zeta,
correction, verify, errata.  Output is JSON (default) or CSV, written to
stdout or to ``--out``; with ``--out`` a ``.meta.json`` sidecar records the
version and the full configuration.  Exit status: 0 success, 2 domain
error, 3 failed oracle or numerical check, 64 usage error.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from . import classical as cl
from .special_fn import DomainError
from .spectral_oracle import SpectralConvergenceError

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_ORACLE = 3
EXIT_USAGE = 64

COMMANDS = ("profile", "energy", "resolvent", "spectrum", "heat-trace", "zeta", "correction", "verify", "errata")
MAX_WORKERS = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_grid(spec: str) -> np.ndarray:
    """'a:b:n' -> n evenly spaced points from a to b inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid {spec!r} is not of the form a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"grid {spec!r} is not of the form a:b:n") from None
    if n < 1:
        raise UsageError(f"grid {spec!r} needs n >= 1")
    return np.linspace(a, b, n)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kinkzeta", description="One-loop kink corrections by zeta regularisation.",
                allow_abbrev=False)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--model", choices=("sg", "phi4"), default="sg")
    p.add_argument("--kind", choices=("kink", "antikink", "periodic", "vacuum"), default="kink")
    p.add_argument("--case", choices=("A", "B", "C", "D"), default="A")
    p.add_argument("--m", type=float, default=1.0, help="mass; with --case, the operator scale b")
    p.add_argument("--g", type=float, default=1.0)
    p.add_argument("--k", type=float, default=None, help="elliptic modulus for periodic solutions")
    p.add_argument("--d", type=int, default=None, help="space-time dimension")
    p.add_argument("--M", type=float, default=1.0, help="renormalisation scale")
    p.add_argument("--m-grid", default=None, metavar="a:b:n")
    p.add_argument("--t-grid", default=None, metavar="a:b:n")
    p.add_argument("--s-grid", default=None, metavar="a:b:n")
    p.add_argument("--x-grid", default=None, metavar="a:b:n")
    p.add_argument("--include-background", action="store_true")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--json", action="store_const", const="json", dest="format")
    p.add_argument("--out", default=None, metavar="PATH")
    p.add_argument("--config", default=None, metavar="PATH")
    p.add_argument("--suite", default="all")
    return p


_FLAG_KEYS = ("model", "kind", "case", "m", "g", "k", "d", "M", "m_grid", "t_grid", "s_grid", "x_grid",
              "format", "out", "suite")


def config_argv(path: str) -> List[str]:
    """Flags preset by an INI file (section [kinkzeta] or top level)."""
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    if not text.lstrip().startswith("["):
        text = "[kinkzeta]\n" + text
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    sect = cp["kinkzeta"] if cp.has_section("kinkzeta") else cp[cp.sections()[0]] if cp.sections() else {}
    argv: List[str] = []
    for key, val in sect.items():
        name = key.replace("-", "_")
        if name == "include_background":
            if val.strip().lower() in ("1", "true", "yes", "on"):
                argv.append("--include-background")
        elif name in _FLAG_KEYS:
            argv += ["--" + name.replace("_", "-"), val.strip()]
        else:
            raise UsageError(f"unknown config key {key!r}")
    return argv


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    argv = list(argv)
    pre = _Parser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config:
        # file values first, so flags given on the command line win
        argv = config_argv(known.config) + argv
    return build_parser().parse_args(argv)


# -- formatting ---------------------------------------------------------------


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def _parse_cell(s: str):
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(source) -> Tuple[List[str], List[dict]]:
    """Parse CSV written by this tool, restoring ints, floats, booleans and blanks."""
    text = Path(source).read_text() if not hasattr(source, "read") else source.read()
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [{c: _parse_cell(v) for c, v in zip(columns, rec)} for rec in reader]
    return columns, rows


def _jsonable(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def pmap(fn: Callable, items: Sequence) -> list:
    """Order-preserving bounded parallel map."""
    items = list(items)
    if len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(MAX_WORKERS, len(items))) as ex:
        return list(ex.map(fn, items))


# -- commands -----------------------------------------------------------------


class Result:
    def __init__(self, columns, rows, extra=None, document=None, failed=False):
        self.columns = list(columns)
        self.rows = [{c: _jsonable(r.get(c)) for c in self.columns} for r in rows]
        self.extra = extra or {}
        self.document = document
        self.failed = failed


def _require_positive(**kw):
    for name, v in kw.items():
        if v is not None and not (v > 0 and math.isfinite(v)):
            raise DomainError(f"--{name} must be positive and finite (got {v})")


def _check_k(k, required: bool):
    if k is None:
        if required:
            raise DomainError("this selection needs --k in (0, 1]")
        return
    if not 0.0 < k <= 1.0:
        raise DomainError(f"--k must lie in (0, 1] (got {k})")


def _family(a) -> cl.SolutionFamily:
    _require_positive(m=a.m, g=a.g)
    _check_k(a.k, a.kind == "periodic")
    return cl.make_family(a.model, a.kind, a.m, a.g, a.k if a.kind == "periodic" else None)


def _case(a) -> cl.FluctuationCase:
    _require_positive(m=a.m)
    periodic = a.case in ("B", "D")
    _check_k(a.k, periodic)
    return cl.FluctuationCase(a.case, a.m, a.k if periodic else None)


def cmd_profile(a) -> Result:
    fam = _family(a)
    if a.x_grid:
        xs = parse_grid(a.x_grid)
    elif fam.kind is cl.Kind.PERIODIC and fam.k < 1.0:
        from .special_fn import elliptic_K

        half = 2.0 * elliptic_K(fam.k) / fam.b
        xs = np.linspace(-half, half, 201)
    else:
        xs = np.linspace(-10.0 / fam.b, 10.0 / fam.b, 201)
    cols = ("x", "phi", "dphi", "u", "density")
    rows = [dict(zip(cols, r)) for r in cl.profile_table(fam, xs)]
    return Result(cols, rows, {"W": fam.W, "b": fam.b})


def cmd_energy(a) -> Result:
    ms = parse_grid(a.m_grid) if a.m_grid else [a.m]
    _check_k(a.k, a.kind == "periodic")

    def one(m):
        _require_positive(m=m, g=a.g)
        fam = cl.make_family(a.model, a.kind, float(m), a.g, a.k if a.kind == "periodic" else None)
        e = cl.classical_energy(fam)
        return {"model": a.model, "kind": a.kind, "m": float(m), "g": a.g, "k": fam.k,
                "quadrature": e.quadrature, "closed_form": e.closed_form,
                "closed_form_corrected": e.closed_form_corrected}

    cols = ("model", "kind", "m", "g", "k", "quadrature", "closed_form", "closed_form_corrected")
    return Result(cols, pmap(one, ms))


def cmd_resolvent(a) -> Result:
    from .resolvent import resolvent_json, solve_PQ

    res = solve_PQ(_case(a))
    doc = json.loads(resolvent_json(res))
    rows = [{"item": "P", "index": 0, "value": doc["P"]}, {"item": "Q", "index": 0, "value": doc["Q"]}]
    rows += [{"item": "root", "index": i, "value": r} for i, r in enumerate(doc["roots"])]
    return Result(("item", "index", "value"), rows, document=doc)


def cmd_spectrum(a) -> Result:
    from .spectral_oracle import band_edges, kink_box_spectrum

    case = _case(a)
    if case.is_periodic:
        vals = band_edges(case)
        label = "band_edge"
    else:
        vals = [float(v) for v in kink_box_spectrum(case, count=8).eigenvalues]
        label = "box_eigenvalue"
    rows = [{"index": i, "eigenvalue": v} for i, v in enumerate(vals)]
    return Result(("index", "eigenvalue"), rows, {"kind": label})


def cmd_heat_trace(a) -> Result:
    from .spectral_oracle import heat_trace_fd
    from .zeta_engine import gamma_t_bromwich, gamma_t_closed

    case = _case(a)
    ts = parse_grid(a.t_grid or "0.2:5:25")
    if np.any(ts <= 0):
        raise DomainError("t-grid must be positive")
    fd = heat_trace_fd(case, ts)
    ref = gamma_t_bromwich(case, ts) if case.is_periodic else gamma_t_closed(case, ts)
    rows = [{"t": float(t), "gamma_fd": float(f), "gamma_closed": float(r)} for t, f, r in zip(ts, fd, ref)]
    return Result(("t", "gamma_fd", "gamma_closed"), rows)


def cmd_zeta(a) -> Result:
    from . import zeta_engine as ze

    case = _case(a)
    d = a.d or 1
    if not 1 <= d <= 4:
        raise DomainError("--d must lie in 1..4")
    _require_positive(M=a.M)
    ss = [float(s) for s in parse_grid(a.s_grid or "0.1:0.9:9")]
    if case.is_periodic:
        r = ze.periodic_zeta_numeric(case, d, ss, a.M)
        zs, closed = r.zeta, [None] * len(ss)
        z0, zp = r.zeta0, r.zeta_prime0
    else:
        base = ze.sg_kink_trace(case.b) if case.case_id == "A" else ze.phi4_kink_trace(case.b)
        tr = ze.dimension_lift(base, d)
        zs = pmap(lambda s: ze.mellin_zeta(tr, s, a.M), ss)
        z0, zp = ze.mellin_zeta_prime0(tr, a.M)
        if case.case_id == "A":
            closed = pmap(lambda s: ze.zeta_closed_sg_kink(s, d, case.b, a.M), ss)
        else:
            closed = [None] * len(ss)
    rows = [{"s": s, "zeta": z, "zeta_closed": c} for s, z, c in zip(ss, zs, closed)]
    return Result(("s", "zeta", "zeta_closed"), rows,
                  {"zeta0": z0, "zeta_prime0": zp, "delta_eps": -0.5 * zp})


def cmd_correction(a) -> Result:
    from .zeta_engine import delta_epsilon

    ds = [a.d] if a.d else [1, 2, 3]
    ms = [float(m) for m in parse_grid(a.m_grid)] if a.m_grid else [a.m]
    _require_positive(M=a.M)
    for m in ms:
        _require_positive(m=m)
    points = [(d, m) for d in ds for m in ms]

    def one(pt):
        d, m = pt
        r = delta_epsilon(d, m, a.M, a.include_background)
        row = {"d": d, "m": m, "zeta0": r.closed.zeta0, "zeta_prime0": r.closed.zeta_prime0,
               "delta_eps_closed": r.closed.delta_eps, "delta_eps_numeric": r.numeric.delta_eps}
        if r.background is not None:
            row.update(bg_zeta0=r.background.zeta0, bg_zeta_prime0=r.background.zeta_prime0,
                       delta_eps_background=r.background.delta_eps,
                       delta_eps_total=r.closed.delta_eps + r.background.delta_eps)
        return row

    rows = pmap(one, points)
    cols = ["d", "m", "zeta0", "zeta_prime0", "delta_eps_closed", "delta_eps_numeric"]
    if a.include_background:
        cols += ["bg_zeta0", "bg_zeta_prime0", "delta_eps_background", "delta_eps_total"]
    extra = {"delta_eps": rows[0]["delta_eps_closed"]} if len(rows) == 1 else {}
    return Result(cols, rows, extra)


def cmd_verify(a) -> Result:
    from .verify import SUITES, run_suite

    if a.suite != "all" and a.suite not in SUITES:
        raise UsageError(f"unknown suite {a.suite!r}; choose from all, {', '.join(SUITES)}")
    rows = [asdict(r) for r in run_suite(a.suite)]
    failed = not all(r["passed"] for r in rows)
    return Result(("criterion", "check", "value", "tolerance", "passed"), rows,
                  {"all_passed": not failed}, failed=failed)


def cmd_errata(a) -> Result:
    from .errata import errata_report

    rows = errata_report()
    failed = not all(r["passed"] for r in rows)
    return Result(("tag", "printed", "implemented", "oracle", "passed", "max_discrepancy"), rows,
                  {"entries": len(rows)}, failed=failed)


DISPATCH: Dict[str, Callable[[argparse.Namespace], Result]] = {
    "profile": cmd_profile,
    "energy": cmd_energy,
    "resolvent": cmd_resolvent,
    "spectrum": cmd_spectrum,
    "heat-trace": cmd_heat_trace,
    "zeta": cmd_zeta,
    "correction": cmd_correction,
    "verify": cmd_verify,
    "errata": cmd_errata,
}


def config_echo(a: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(a).items()) if k not in ("out", "config")}


def render(a: argparse.Namespace, res: Result) -> str:
    if a.format == "csv":
        return write_csv(res.columns, res.rows)
    meta = {"version": __version__, "config": config_echo(a)}
    if res.document is not None:
        doc = dict(res.document)
    else:
        doc = {"columns": res.columns, "rows": res.rows}
        doc.update({k: _jsonable(v) for k, v in res.extra.items()})
    doc["meta"] = meta
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def emit(a: argparse.Namespace, text: str) -> None:
    if a.out is None:
        sys.stdout.write(text)
        return
    out = Path(a.out)
    out.write_text(text)
    sidecar = out.with_name(out.name + ".meta.json")
    meta = {"version": __version__, "command": a.command, "config": config_echo(a)}
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        a = parse_args(argv)
        res = DISPATCH[a.command](a)
        emit(a, render(a, res))
        return EXIT_ORACLE if res.failed else EXIT_OK
    except UsageError as exc:
        sys.stderr.write(f"kinkzeta: usage error: {exc}\n")
        return EXIT_USAGE
    except DomainError as exc:
        sys.stderr.write(f"kinkzeta: domain error: {exc}\n")
        return EXIT_DOMAIN
    except (ArithmeticError, SpectralConvergenceError, cl.QuadratureError) as exc:
        sys.stderr.write(f"kinkzeta: numerical check failed: {exc}\n")
        return EXIT_ORACLE


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run_command(argv))
