"""Randomized property sweep over rational Schur functions and arcs."""

from __future__ import annotations

import json
import math

import numpy as np

from .boundary import CircleArc
from .pipeline import VerifyConfig, config_echo, run
from .rational import ComplexPoly, RationalFn, boundary_sup
from .synthesis import DEFAULT_SYNTH, SynthesisConfig

BLASCHKE_PROBABILITY = 0.1


def _disk_points(rng: np.random.Generator, k: int, radius: float = 0.9) -> list[complex]:
    r = radius * np.sqrt(rng.uniform(0, 1, k))
    phi = rng.uniform(0, 2 * math.pi, k)
    return [complex(x) for x in r * np.exp(1j * phi)]


def _exterior_points(rng: np.random.Generator, k: int, lo: float = 1.2, hi: float = 3.0) -> list[complex]:
    r = rng.uniform(lo, hi, k)
    phi = rng.uniform(0, 2 * math.pi, k)
    return [complex(x) for x in r * np.exp(1j * phi)]


def random_schur(rng: np.random.Generator) -> RationalFn:
    """Blaschke product of degree <= 4 times a zero-free rational outer, scaled into (0.3, 0.95).

    With probability 0.1 the outer part is dropped and a pure finite
    Blaschke product (times a unimodular constant) is returned.
    """
    if rng.uniform() < BLASCHKE_PROBABILITY:
        zeros = _disk_points(rng, int(rng.integers(1, 5)))
        return RationalFn.blaschke(zeros, np.exp(1j * rng.uniform(0, 2 * math.pi)))
    b = RationalFn.blaschke(_disk_points(rng, int(rng.integers(0, 5))))
    num = ComplexPoly.from_roots(_exterior_points(rng, int(rng.integers(0, 3))))
    den = ComplexPoly.from_roots(_exterior_points(rng, int(rng.integers(0, 3))))
    f = b * RationalFn(num, den).reduced()
    scale = rng.uniform(0.3, 0.95) / boundary_sup(f)
    return f * (scale * np.exp(1j * rng.uniform(0, 2 * math.pi)))


def random_arc(rng: np.random.Generator) -> CircleArc:
    length = rng.uniform(0.1, 1.9) * math.pi
    alpha = rng.uniform(0, 2 * math.pi)
    return CircleArc(alpha, alpha + length)


def run_sweep(seed: int, count: int, synth: SynthesisConfig = DEFAULT_SYNTH,
              verify: VerifyConfig = VerifyConfig()) -> dict:
    """Aggregate report of `count` random problems; deterministic in `seed`."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    cases = []
    worst: dict[str, float] = {}
    passed = True
    for k in range(count):
        s = random_schur(rng)
        arc = random_arc(rng)
        out = run(s, arc, synth, verify)
        residuals = {}
        for th, rep in sorted(out.reports.items()):
            residuals[f"theorem{th}"] = {name: c.value for name, c in sorted(rep.checks.items())}
            for name, c in rep.checks.items():
                key = f"theorem{th}.{name}"
                worst[key] = max(worst.get(key, 0.0), c.value)
            passed &= rep.passed
        cases.append({
            "index": k,
            "branch": out.branch,
            "s": s.reduced().to_dict(),
            "arc": arc.to_dict(),
            "residuals": residuals,
            "verdict": "pass" if all(r.passed for r in out.reports.values()) else "fail",
        })
    return {
        "seed": seed,
        "count": count,
        "config": config_echo(synth, verify),
        "branches": {b: sum(c["branch"] == b for c in cases) for b in ("darlington", "diagonal")},
        "max_residuals": dict(sorted(worst.items())),
        "cases": cases,
        "verdict": "pass" if passed else "fail",
    }


def dumps(aggregate: dict) -> str:
    return json.dumps(aggregate, indent=2, sort_keys=True) + "\n"
