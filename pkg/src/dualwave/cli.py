"""Command-line front end.

    dualwave construct --family monomial --n -1 --grid annular:0.5,2,64,128
    dualwave verify    --family monomial --n 2 --out runs/n2
    dualwave trace     --family eaton-exact --a 1 --impact 0.1,0.5,0.9
    dualwave report    --out runs/n2

Exit codes: 0 ok, 1 a verification gate failed, 2 configuration error,
3 evaluation error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from . import __version__
from .complex_core import PotentialSpec
from .errors import ConfigError, DualWaveError, StencilOutOfDomain
from .grid import Grid2D, parse_grid
from .io import (read_csv, write_deflection_csv, write_field_csv, write_json, write_ray_csv,
                 field_metadata, write_csv, fmt)
from .optics import IndexMap, deflection_curve
from .verifier import IDENTITIES, parse_negative_control, run_suite
from .wavefunction import DualWavefunction, Which, sample_grid, single_valuedness

COMMANDS = ("construct", "verify", "trace", "report")
FAMILIES = ("monomial", "eaton-exact", "eaton-approx")


@dataclass
class RunConfig:
    command: str
    family: str = "monomial"
    n: float = 0.0
    alpha: Optional[float] = None
    m: float = 1.0
    hbar: float = 1.0
    energy_shift: float = 0.0
    a: float = 1.0
    phi: float = math.pi
    grid: Optional[str] = None
    which: str = "both"
    step: float = 1e-4
    impact: str = "0.5"
    r_out: float = 1.0
    max_steps: int = 1_000_000
    out: str = "out"
    negative_control: Optional[str] = None

    def spec(self) -> PotentialSpec:
        try:
            return self._spec()
        except ConfigError:
            raise
        except DualWaveError as exc:
            raise ConfigError(str(exc)) from None

    def _spec(self) -> PotentialSpec:
        for name in ("m", "hbar"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"--{name} must be positive")
        if self.family == "monomial":
            if self.alpha is not None and not self.alpha > 0:
                raise ConfigError("--alpha must be positive")
            return PotentialSpec.monomial(self.n, self.alpha, self.m, self.hbar,
                                          self.energy_shift)
        if not self.a > 0:
            raise ConfigError("--a must be positive")
        if self.family == "eaton-exact":
            return PotentialSpec.eaton_exact(self.a, self.m, self.hbar)
        if self.family == "eaton-approx":
            if not self.phi > 0:
                raise ConfigError("--phi must be positive")
            return PotentialSpec.eaton_approx(self.a, self.phi, self.m, self.hbar)
        raise ConfigError(f"--family must be one of {', '.join(FAMILIES)}")

    def grid2d(self) -> Optional[Grid2D]:
        if self.grid is None:
            return None
        try:
            return parse_grid(self.grid)
        except ValueError as exc:
            raise ConfigError(f"--grid: {exc}") from None

    def duals(self):
        if self.which == "both":
            return list(Which)
        try:
            return [Which(self.which)]
        except ValueError:
            raise ConfigError("--which must be u, v or both") from None

    def impacts(self) -> list:
        try:
            return [float(v) for v in self.impact.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--impact: cannot parse {self.impact!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualwave", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON file with defaults; flags take precedence")
        p.add_argument("--family", choices=FAMILIES)
        p.add_argument("--n", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--m", type=float)
        p.add_argument("--hbar", type=float)
        p.add_argument("--energy-shift", type=float)
        p.add_argument("--a", type=float)
        p.add_argument("--phi", type=float)
        p.add_argument("--grid", help="cartesian:x0,x1,y0,y1,nx[,ny] | annular|logpolar:rmin,rmax,nr,nt[,t0,t1]")
        p.add_argument("--which", choices=("u", "v", "both"))
        p.add_argument("--step", type=float)
        p.add_argument("--impact", help="comma-separated impact parameters")
        p.add_argument("--r-out", type=float)
        p.add_argument("--max-steps", type=int)
        p.add_argument("--out")
        p.add_argument("--negative-control", help="param:pct, e.g. alpha:5")
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            values = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError(f"--config: {exc}") from None
        if not isinstance(values, dict):
            raise ConfigError("--config must hold a JSON object")
        values = {k.replace("-", "_"): v for k, v in values.items()}
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"--config: unknown keys {sorted(unknown)}")
    for name in known - {"command"}:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    values["command"] = args.command
    return RunConfig(**values)


def _sidecar(out: Path, cfg: RunConfig, argv) -> None:
    # timestamps live only here so data files stay byte-stable
    write_json(out / "run.json", {
        "version": __version__, "argv": list(argv), "config": cfg.__dict__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    })


def default_construct_grid(spec: PotentialSpec) -> Grid2D:
    if spec.n < 0:
        return Grid2D.annular(0.1, 2.0, 64, 64, log_radial=True)
    return Grid2D.cartesian(-2.0, 2.0, -2.0, 2.0, 64, 64)


def cmd_construct(cfg: RunConfig, out: Path) -> int:
    spec = cfg.spec()
    grid = cfg.grid2d() or default_construct_grid(spec)
    sv = single_valuedness(spec)
    meta = {}
    for which in cfg.duals():
        w = DualWavefunction.from_spec(spec, which)
        sample = sample_grid(w, grid)
        if spec.is_logarithmic:
            sample.meta["dispatch"] = "logarithmic"
        sample.meta["multivalued"] = bool(sv.multivalued[which.value])
        sample.meta["period"] = sv.period if sv.verified[which.value] is not None else None
        write_field_csv(sample, out / f"psi_{which.value}.csv")
        meta[f"psi_{which.value}"] = field_metadata(sample)
    write_json(out / "metadata.json", meta)
    return 0


def cmd_verify(cfg: RunConfig, out: Path) -> int:
    spec = cfg.spec()
    try:
        control = parse_negative_control(cfg.negative_control)
    except ValueError as exc:
        raise ConfigError(f"--negative-control: {exc}") from None
    result = run_suite(spec, cfg.grid2d(), control)
    for name in IDENTITIES:
        write_json(out / f"{name}.json", {
            "identity": name, "pass": result.passed(name),
            "duals": {k: rep.to_dict() for k, rep in result.reports[name].items()},
        })
    write_json(out / "analytic.json", result.analytic)
    rows = result.rows()
    summary = {
        "spec": spec.to_dict(), "grid": result.grid.describe(),
        "negative_control": cfg.negative_control,
        "identities": {name: result.passed(name) for name in IDENTITIES},
        "analytic_pass": result.analytic["passed"],
        "rows": rows, "all_pass": result.all_passed,
    }
    write_json(out / "summary.json", summary)
    write_csv(out / "summary.csv", ("identity", "dual", "l2", "linf", "order", "pass"),
              ((r["identity"], r["dual"], r["l2"], r["linf"], r["order"], r["pass"])
               for r in rows))
    for r in rows:
        order = "-" if r["order"] is None else f"{r['order']:.3f}"
        print(f"{r['identity']:<16} {r['dual']}  linf={r['linf']:.3e}  order={order:>6}  "
              f"{'PASS' if r['pass'] else 'FAIL'}")
    return 0 if result.all_passed else 1


def cmd_trace(cfg: RunConfig, out: Path) -> int:
    spec = cfg.spec()
    if not cfg.step > 0:
        raise ConfigError("--step must be positive")
    imap = IndexMap.for_spec(spec, r_out=cfg.r_out)
    rows = deflection_curve(imap, cfg.impacts(), cfg.step, cfg.max_steps)
    for i, row in enumerate(rows):
        if row.path is not None:
            write_ray_csv(out / f"ray_{i:03d}.csv", row.path)
        d = "nan" if row.deflection is None else f"{row.deflection:.12f}"
        print(f"b={row.b:<8g} deflection={d}  {row.termination}")
    write_deflection_csv(out / "deflection.csv", rows)
    return 0 if any(r.deflection is not None for r in rows) else 3


def cmd_report(cfg: RunConfig, out: Path) -> int:
    lines = []
    summary = out / "summary.json"
    if summary.exists():
        data = json.loads(summary.read_text())
        lines.append(f"{'identity':<16} dual {'l2':>12} {'linf':>12} {'order':>8} result")
        for r in data["rows"]:
            order = "-" if r["order"] is None else fmt(round(r["order"], 4))
            lines.append(f"{r['identity']:<16} {r['dual']:^4} {r['l2']:12.4e} {r['linf']:12.4e} "
                         f"{order:>8} {'PASS' if r['pass'] else 'FAIL'}")
        lines.append(f"analytic residual pass: {data['analytic_pass']}")
        lines.append(f"overall: {'PASS' if data['all_pass'] else 'FAIL'}")
    deflection = out / "deflection.csv"
    if deflection.exists():
        lines.append(f"{'b':>10} {'deflection_rad':>20} termination")
        for r in read_csv(deflection):
            lines.append(f"{r['b']:>10} {r['deflection_rad']:>20} {r['termination']}")
    if not lines:
        raise ConfigError(f"--out: no summary.json or deflection.csv in {out}")
    text = "\n".join(lines) + "\n"
    (out / "report.txt").write_text(text, encoding="utf-8", newline="\n")
    print(text, end="")
    return 0


HANDLERS = {"construct": cmd_construct, "verify": cmd_verify, "trace": cmd_trace,
            "report": cmd_report}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args)
        out = Path(cfg.out)
        if cfg.command != "report":
            out.mkdir(parents=True, exist_ok=True)
            _sidecar(out, cfg, argv)
        return HANDLERS[cfg.command](cfg, out)
    except (ConfigError, StencilOutOfDomain) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except DualWaveError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
