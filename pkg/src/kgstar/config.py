"""Experiment configuration: flat ``key = value`` text with dotted sections.

Example::

    # two branches, potential step at the vertex
    network.c = 1, 1
    network.a = 0, 10
    profile.k = 1
    profile.alpha = 0.25
    profile.beta = 0.75
    observe.r = 2

A ``[section]`` header prefixes the keys that follow it, so ``[profile]``
then ``alpha = 0.25`` is the same as ``profile.alpha = 0.25``. Lists are
comma separated, optionally in brackets. ``#`` starts a comment.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import BranchHypothesisViolated, ParseError
from .initial_data import SpectralProfile, bump, make_profile
from .io import text_hash
from .network import StarNetwork, validate_network

_SECTION = re.compile(r"^\[([A-Za-z_][\w.]*)\]$")
_KEY = re.compile(r"^[A-Za-z_][\w]*(\.[A-Za-z_][\w]*)*$")

REQUIRED = ("network.c", "network.a", "profile.k", "profile.alpha", "profile.beta", "observe.r")

# key -> (kind, default); kind is int, float, floats, ints, str
SCHEMA = {
    "network.c": ("floats", None),
    "network.a": ("floats", None),
    "profile.j": ("int", None),
    "profile.k": ("int", None),
    "profile.alpha": ("float", None),
    "profile.beta": ("float", None),
    "profile.shift": ("float", None),
    "profile.order": ("int", 3),
    "profile.amplitude": ("float", 1.0),
    "observe.r": ("int", None),
    "grids.t_list": ("floats", None),
    "grids.x_list": ("floats", (1.0, 5.0, 10.0)),
    "grids.slopes": ("floats", None),
    "grids.a2_grid": ("floats", None),
    "grids.rays_per_cone": ("int", 64),
    "grids.sweep_times": ("floats", (1e4, 1e5, 1e6)),
    "eigen.samples": ("int", 100),
    "eigen.h": ("float", 1e-2),
    "transform.branch": ("int", 1),
    "transform.center": ("float", 6.0),
    "transform.width": ("float", 0.5),
    "transform.panels": ("ints", (16, 32, 64)),
    "tolerances.kirchhoff": ("float", 1e-10),
    "tolerances.isometry": ("float", 1e-3),
    "tolerances.remainder_growth": ("float", 1.5),
    "run.seed": ("int", 0),
    "run.panel_cap": ("int", None),
    "output.dir": ("str", "out"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    net: StarNetwork
    profile: SpectralProfile
    r: int
    values: dict
    text_hash: str

    def get(self, key: str):
        return self.values[key]

    @property
    def t_list(self) -> list[float]:
        t = self.values["grids.t_list"]
        return list(t) if t is not None else [float(v) for v in np.geomspace(1e2, 1e4, 8)]

    @property
    def a2_grid(self) -> list[float]:
        g = self.values["grids.a2_grid"]
        return list(g) if g is not None else [float(v) for v in 10 ** np.arange(2.0, 4.01, 0.5)]


def _convert(kind: str, raw: str, key: str, line: int):
    body = raw.strip()
    if kind in ("floats", "ints"):
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        parts = [p.strip() for p in body.split(",") if p.strip()]
        conv = int if kind == "ints" else float
        try:
            out = tuple(conv(p) for p in parts)
        except ValueError:
            raise ParseError(f"{key}: expected a list of {'integers' if kind == 'ints' else 'numbers'}",
                             line=line, field=key) from None
        if kind == "floats" and not all(math.isfinite(v) for v in out):
            raise ParseError(f"{key}: values must be finite", line=line, field=key)
        return out
    if kind == "str":
        return body.strip("\"'")
    try:
        v = int(body) if kind == "int" else float(body)
    except ValueError:
        raise ParseError(f"{key}: expected {'an integer' if kind == 'int' else 'a number'}, got {body!r}",
                         line=line, field=key) from None
    if kind == "float" and not math.isfinite(v):
        raise ParseError(f"{key}: value must be finite", line=line, field=key)
    return v


def parse_values(text: str) -> dict:
    """Raw key/value pass with defaults filled; no cross-field validation."""
    seen: dict = {}
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            section = m.group(1) + "."
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        key, raw = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise ParseError(f"malformed key {key!r}", line=lineno)
        key = section + key
        if key not in SCHEMA:
            raise ParseError(f"unknown key {key!r}", line=lineno, field=key)
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", line=lineno, field=key)
        if not raw:
            raise ParseError(f"{key}: empty value", line=lineno, field=key)
        seen[key] = _convert(SCHEMA[key][0], raw, key, lineno)
    for key in REQUIRED:
        if key not in seen:
            raise ParseError(f"missing required field {key!r}", field=key)
    return {key: seen.get(key, default) for key, (_, default) in SCHEMA.items()}


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate; network and profile errors propagate unchanged."""
    vals = parse_values(text)
    net = validate_network(vals["network.c"], vals["network.a"])
    j = vals["profile.j"] if vals["profile.j"] is not None else net.n
    vals["profile.j"] = j
    if vals["profile.shift"] is None:
        vals["profile.shift"] = net.coeffs(j)[1] if 1 <= j <= net.n else 0.0
    psi = bump(vals["profile.alpha"], vals["profile.beta"], vals["profile.order"])
    prof = make_profile(net, j, vals["profile.k"], psi, shift=vals["profile.shift"],
                        amplitude=vals["profile.amplitude"])
    r = vals["observe.r"]
    if not 1 <= r <= net.n or r > j or r == prof.k:
        raise BranchHypothesisViolated(f"observation branch r={r} needs 1 <= r <= j={j} and r != k={prof.k}")
    return ExperimentConfig(net, prof, r, vals, text_hash(text))


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())


def panel_cap_of(cfg: ExperimentConfig, override: Optional[int] = None) -> Optional[int]:
    return override if override is not None else cfg.values["run.panel_cap"]
