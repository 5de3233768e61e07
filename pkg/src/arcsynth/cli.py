"""Command-line front end.

Exit codes: 0 every check passed, 1 a verification check failed,
2 usage error (bad flags, unreadable or malformed JSON), 3 data error
(input is not a Schur function, denominator vanishes in the closed disk, ...).

CSV files (UTF-8, LF) have fixed columns:
  samples.csv    angle, entry, re, im     matrix values at the grid points
  residuals.csv  angle, check, value      per-sample residuals
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import click
import numpy as np

from . import sweep as sweep_mod
from .boundary import DEFAULT_QUAD, CircleArc, QuadratureConfig
from .errors import ArcSynthError, NotSchurError
from .pipeline import VerifyConfig, config_echo, reverify, run
from .rational import POLE_PROXIMITY, ComplexPoly, RationalFn
from .synthesis import DEFAULT_SYNTH, EvalCache, MatrixFn2, SynthesisConfig
from .verification import full_grids, psd_parts, unitarity_samples

ENTRY_NAMES = ("11", "12", "21", "22")
CONFIG_KEYS = {"rel_tol", "abs_tol", "rho", "endpoint_margin", "grid", "tol", "max_subdivisions"}


class DataError(click.ClickException):
    exit_code = 3


class VerificationFailed(click.ClickException):
    exit_code = 1


def _poly(value, name: str) -> ComplexPoly:
    if not isinstance(value, list) or not value:
        raise ValueError(f"{name} must be a non-empty list of [re, im] pairs")
    pairs = []
    for c in value:
        if isinstance(c, (int, float)) and not isinstance(c, bool):
            pairs.append((float(c), 0.0))
        elif isinstance(c, list) and len(c) == 2 and all(isinstance(x, (int, float)) for x in c):
            pairs.append((float(c[0]), float(c[1])))
        else:
            raise ValueError(f"{name}: coefficient {c!r} is not a number or an [re, im] pair")
    return ComplexPoly.from_pairs(pairs)


def parse_arc(text) -> CircleArc:
    """'full', 'alpha,beta' (radians) or a mapping with alpha and beta."""
    if isinstance(text, dict):
        return CircleArc(float(text["alpha"]), float(text["beta"]))
    if str(text).strip().lower() == "full":
        return CircleArc.full()
    parts = str(text).split(",")
    if len(parts) != 2:
        raise ValueError(f"arc must be 'full' or 'alpha,beta', got {text!r}")
    return CircleArc(float(parts[0]), float(parts[1]))


@dataclass
class ProblemSpec:
    """A synthesis problem as read from JSON."""

    num: ComplexPoly
    den: ComplexPoly
    arc: Optional[CircleArc] = None
    eps: float = DEFAULT_SYNTH.eps
    config: dict = field(default_factory=dict)

    @property
    def s(self) -> RationalFn:
        return RationalFn(self.num, self.den)

    @classmethod
    def from_dict(cls, data) -> "ProblemSpec":
        """Structural problems raise ValueError; analytic ones are left to `check`."""
        if not isinstance(data, dict) or not isinstance(data.get("s"), dict):
            raise ValueError("problem must be an object with an 's' entry")
        s = data["s"]
        num = _poly(s.get("num"), "s.num")
        den = _poly(s.get("den", [[1.0, 0.0]]), "s.den")
        if den.is_zero:
            raise ValueError("s.den is the zero polynomial")
        arc = parse_arc(data["arc"]) if data.get("arc") is not None else None
        eps = float(data.get("eps", DEFAULT_SYNTH.eps))
        config = dict(data.get("config", {}))
        unknown = set(config) - CONFIG_KEYS
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(num, den, arc, eps, config)

    @classmethod
    def from_json(cls, text: str) -> "ProblemSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        out = {"s": {"num": self.num.to_pairs(), "den": self.den.to_pairs()}, "eps": self.eps,
               "config": dict(self.config)}
        if self.arc is not None:
            out["arc"] = self.arc.to_dict()
        return out

    def check(self):
        """Reject denominators with a root in the closed unit disk (after cancellation)."""
        for p in self.s.reduced().poles:
            if abs(p) <= 1 + POLE_PROXIMITY:
                raise DataError(f"denominator has a root at {complex(p):.12g} "
                                f"(|root| = {abs(p):.12g}) in the closed unit disk")


def _configs(base: dict, eps, tol_quad, rho, grid, margin) -> tuple[SynthesisConfig, VerifyConfig]:
    """Flags override the problem file, which overrides the defaults."""
    merged = dict(base)
    for key, val in (("rel_tol", tol_quad), ("rho", rho), ("grid", grid), ("endpoint_margin", margin)):
        if val is not None:
            merged[key] = val
    try:
        quad = replace(DEFAULT_QUAD, **{k: merged[k] for k in
                                        ("rel_tol", "abs_tol", "rho", "endpoint_margin", "max_subdivisions")
                                        if k in merged})
        verify = VerifyConfig(n_grid=int(merged.get("grid", 512)), tol=float(merged.get("tol", 1e-3)))
        if verify.n_grid < 16:
            raise ValueError("grid must be at least 16")
        synth = SynthesisConfig(eps=float(eps), quad=quad)
        if not 0 < synth.eps < 1 / 3:
            raise ValueError("epsilon must lie in (0, 1/3)")
    except (ValueError, TypeError) as exc:
        raise click.UsageError(str(exc)) from exc
    return synth, verify


def _config_from_echo(echo: dict) -> tuple[SynthesisConfig, VerifyConfig]:
    quad = QuadratureConfig(**echo["quad"])
    synth = SynthesisConfig(eps=float(echo["eps"]), quad=quad, cert_tol=float(echo["cert_tol"]))
    verify = VerifyConfig(n_grid=int(echo["grid"]), tol=float(echo["tol"]),
                          n_interior=int(echo["interior_points"]))
    return synth, verify


def _write(path: Path, text: str):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_samples(M: MatrixFn2, theorem: int, s: RationalFn, arc: CircleArc, synth: SynthesisConfig,
                  verify: VerifyConfig, out_dir: Path):
    """Boundary values and per-sample residuals on the arc and its complement."""
    q = synth.quad
    grids = full_grids(arc, verify.n_grid, q.rho, q.endpoint_margin)
    cache = EvalCache()
    samples, residuals = [], []
    for k, grid in enumerate(grids):
        vals = M.evaluate(grid.points_for(M), q, cache)
        for a, v in zip(grid.angles, vals):
            for name, x in zip(ENTRY_NAMES, v.reshape(-1)):
                samples.append((repr(float(a)), name, repr(float(x.real)), repr(float(x.imag))))
        label = "arc" if k == 0 else "complement"
        for a, u in zip(grid.angles, unitarity_samples(M, grid, q, cache)):
            residuals.append((repr(float(a)), f"unitarity_{label}", repr(float(u))))
        if theorem == 2 and k == 1 and M.meta.get("branch") == "darlington":
            p = psd_parts(M, grid, synth.eps, s, q, cache)
            for a, lam in zip(grid.angles, p["lambda_min"]):
                residuals.append((repr(float(a)), "psd_lambda_min", repr(float(lam))))
    _write_csv(out_dir / "samples.csv", ("angle", "entry", "re", "im"), samples)
    _write_csv(out_dir / "residuals.csv", ("angle", "check", "value"), residuals)


def _echo_report(rep, header: str):
    click.echo(header)
    for name, c in rep.checks.items():
        mark = "ok  " if c.passed else "FAIL"
        click.echo(f"  {mark} {name:<26} {c.value:.3e}  (tol {c.tolerance:.1e})")
    for key in ("sigma_arc_at_0", "r_at_0"):
        if key in rep.values:
            click.echo(f"  {key} = {rep.values[key]:.10g}")
    click.echo(f"verdict: {rep.verdict}")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main():
    """Unitary 2x2 completions of rational Schur functions on an arc of the circle."""


def _quad_options(f):
    opts = [
        click.option("--epsilon", type=float, default=None, help="Two-level outer parameter, in (0, 1/3)."),
        click.option("--tol-quad", type=float, default=None, help="Relative quadrature tolerance."),
        click.option("--rho", type=float, default=None, help="Radius of the boundary proxy points."),
        click.option("--grid", type=int, default=None, help="Samples per arc."),
        click.option("--endpoint-margin", type=float, default=None,
                     help="Trim at each arc end, as a fraction of the arc length."),
        click.option("--output", "output", type=click.Path(file_okay=False), default=".",
                     show_default=True, help="Directory for the output files."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


@main.command()
@click.argument("spec_path", required=False, type=click.Path(dir_okay=False))
@click.option("--arc", "arc_text", default=None, help="'alpha,beta' in radians, or 'full'.")
@click.option("--theorem", type=click.Choice(["1", "2"]), default="1", show_default=True,
              help="1: S unitary on the arc; 2: V also contractive off the arc.")
@_quad_options
@click.option("--samples-csv", is_flag=True, help="Also write samples.csv and residuals.csv.")
@click.option("--reverify", "reverify_path", type=click.Path(dir_okay=False), default=None,
              help="Recompute the checks of a matrix descriptor written earlier.")
def synth(spec_path, arc_text, theorem, epsilon, tol_quad, rho, grid, endpoint_margin, output,
          samples_csv, reverify_path):
    """Synthesize S (theorem 1) or V (theorem 2) for the problem in SPEC_PATH and verify it."""
    out_dir = Path(output)
    if reverify_path is not None:
        _reverify(Path(reverify_path), out_dir)
        return
    if spec_path is None:
        raise click.UsageError("SPEC_PATH is required unless --reverify is given")
    try:
        spec = ProblemSpec.from_json(Path(spec_path).read_text(encoding="utf-8"))
        arc = parse_arc(arc_text) if arc_text is not None else spec.arc
    except OSError as exc:
        raise click.UsageError(f"cannot read {spec_path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise click.UsageError(f"invalid problem file {spec_path}: {exc}") from exc
    if arc is None:
        raise click.UsageError("no arc given: use --arc or an 'arc' entry in the problem file")
    spec.check()
    synth_cfg, verify = _configs(spec.config, spec.eps if epsilon is None else epsilon,
                                 tol_quad, rho, grid, endpoint_margin)
    th = int(theorem)
    s = spec.s.reduced()
    try:
        outcome = run(s, arc, synth_cfg, verify, theorems=(th,))
    except NotSchurError as exc:
        raise DataError(str(exc)) from exc
    except ArcSynthError as exc:
        raise DataError(f"{type(exc).__name__}: {exc}") from exc
    if outcome.branch == "diagonal":
        click.echo("notice: s is a finite Blaschke product; using the diagonal embedding diag(z, s)",
                   err=True)
    M, rep = outcome.matrices[th], outcome.reports[th]
    out_dir.mkdir(parents=True, exist_ok=True)
    descriptor = dict(M.to_dict(), config=config_echo(synth_cfg, verify))
    _write(out_dir / "matrix.json", json.dumps(descriptor, indent=2, sort_keys=True) + "\n")
    _write(out_dir / "report.json", rep.to_json())
    if samples_csv:
        write_samples(M, th, s, arc, synth_cfg, verify, out_dir)
    _echo_report(rep, f"theorem {th} ({outcome.branch}) on arc [{arc.alpha:.6g}, {arc.beta:.6g}]")
    if not rep.passed:
        raise VerificationFailed("verification failed")


def _reverify(path: Path, out_dir: Path):
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
        M = MatrixFn2.from_dict(data)
        synth_cfg, verify = _config_from_echo(data["config"]) if "config" in data else (DEFAULT_SYNTH,
                                                                                         VerifyConfig())
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}") from exc
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise click.UsageError(f"invalid matrix descriptor {path}: {exc}") from exc
    try:
        rep = reverify(M, synth_cfg, verify)
    except ArcSynthError as exc:
        raise DataError(f"{type(exc).__name__}: {exc}") from exc
    out_dir.mkdir(parents=True, exist_ok=True)
    _write(out_dir / "reverify.json", rep.to_json())
    _echo_report(rep, f"reverify {path}")
    if not rep.passed:
        raise VerificationFailed("verification failed")


@main.command()
@click.option("--seed", type=int, default=42, show_default=True)
@click.option("--count", type=click.IntRange(min=1), default=50, show_default=True)
@_quad_options
def sweep(seed, count, epsilon, tol_quad, rho, grid, endpoint_margin, output):
    """Run both theorems on COUNT random Schur functions and arcs; writes sweep.json."""
    synth_cfg, verify = _configs({}, DEFAULT_SYNTH.eps if epsilon is None else epsilon,
                                 tol_quad, rho, grid, endpoint_margin)
    try:
        agg = sweep_mod.run_sweep(seed, count, synth_cfg, verify)
    except ArcSynthError as exc:
        raise DataError(f"{type(exc).__name__}: {exc}") from exc
    out_dir = Path(output)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write(out_dir / "sweep.json", sweep_mod.dumps(agg))
    b = agg["branches"]
    click.echo(f"seed {seed}: {count} cases ({b['darlington']} darlington, {b['diagonal']} diagonal)")
    for name, v in agg["max_residuals"].items():
        click.echo(f"  {name:<36} {v:.3e}")
    click.echo(f"verdict: {agg['verdict']}")
    if agg["verdict"] != "pass":
        raise VerificationFailed("verification failed")


if __name__ == "__main__":  # pragma: no cover
    main()
