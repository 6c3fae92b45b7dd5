"""JSON configuration files.

    {
      "n": 2,
      "projections": [{"coords": [2]}, {"basis": [["1", "1"]]}],
      "offsets": {"a": [[...], ...], "b": [[...], ...]},
      "family": "coords" | "heuristic" | {"subspaces": [<subspace>, ...]},
      "exponents": [["5/2", "5", "inf", "5"]],
      "q": [["2/5", "1/5", "2/5", "1/5"]],
      "functions": [{"lower": [...], "upper": [...]} | {"zero": true}, ...]
    }

Coordinates are 1-based. Rationals are integers or "p/q" strings; floats
are rejected so every exponent is exact. "exponents" lists p vectors
("inf" allowed) and "q" lists reciprocal vectors directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from . import exactla as la
from .conditions import ProjectionConfig, SubspaceFamily, default_family
from .exactla import Subspace
from .heisenberg.montecarlo import BoxIndicator

TOP_KEYS = {"n", "m", "projections", "offsets", "family", "exponents", "q", "functions", "name"}


class ConfigError(ValueError):
    """A malformed configuration; ``where`` names the offending field or line."""

    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ConfigError(f"expected an integer or 'p/q' string, got {value!r}", where)
    try:
        return la.as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a rational: {value!r} ({exc})", where) from None


def parse_q_entry(value: Any, where: str) -> Fraction:
    q = parse_rational(value, where)
    if not 0 <= q <= 1:
        raise ConfigError(f"reciprocal exponent {q} is outside [0, 1]", where)
    return q


def parse_p_entry(value: Any, where: str) -> Fraction:
    """1/p for an exponent p >= 1; "inf" gives 0."""
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity", "oo"):
        return Fraction(0)
    p = parse_rational(value, where)
    if p < 1:
        raise ConfigError(f"exponent p={p} is below 1", where)
    return 1 / p


def parse_vector(value: Any, length: int | None, where: str, entry=parse_rational) -> tuple[Fraction, ...]:
    if isinstance(value, str):
        value = [s for s in value.replace(" ", "").split(",") if s]
    if not isinstance(value, list):
        raise ConfigError("expected a list", where)
    if length is not None and len(value) != length:
        raise ConfigError(f"expected {length} entries, got {len(value)}", where)
    return tuple(entry(v, f"{where}[{i}]") for i, v in enumerate(value))


def parse_subspace(spec: Any, n: int, where: str) -> Subspace:
    if not isinstance(spec, dict) or len(spec) != 1 or not ({"coords", "basis"} & spec.keys()):
        raise ConfigError('expected {"coords": [...]} or {"basis": [[...], ...]}', where)
    if "coords" in spec:
        idx = spec["coords"]
        if not isinstance(idx, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise ConfigError("coords must be a list of integers", f"{where}.coords")
        if len(set(idx)) != len(idx):
            raise ConfigError(f"repeated coordinate index in {idx}", f"{where}.coords")
        bad = [i for i in idx if not 1 <= i <= n]
        if bad:
            raise ConfigError(f"indices {bad} outside 1..{n}", f"{where}.coords")
        return Subspace.coordinate(n, [i - 1 for i in idx])
    basis = spec["basis"]
    if not isinstance(basis, list):
        raise ConfigError("basis must be a list of vectors", f"{where}.basis")
    vecs = [parse_vector(v, n, f"{where}.basis[{i}]") for i, v in enumerate(basis)]
    return Subspace.span(n, vecs)


def parse_subspace_arg(text: str, n: int) -> Subspace:
    """Command-line subspace: "0", "full", "coords:1,3" or "basis:1,1;0,1"."""
    text = text.strip()
    if text in ("0", "{0}", "zero"):
        return Subspace.zero(n)
    if text in ("full", "R^n"):
        return Subspace.full(n)
    kind, _, body = text.partition(":")
    if kind == "coords":
        try:
            idx = [int(s) for s in body.split(",") if s]
        except ValueError:
            raise ConfigError(f"bad coordinate list {body!r}", "subspace") from None
        return parse_subspace({"coords": idx}, n, "subspace")
    if kind == "basis":
        vecs = [row.split(",") for row in body.split(";") if row]
        return parse_subspace({"basis": vecs}, n, "subspace")
    raise ConfigError(f"cannot parse subspace {text!r}; use 0, full, coords:.. or basis:..", "subspace")


@dataclass
class ConfigFile:
    config: ProjectionConfig
    name: str | None = None
    offsets_a: list | None = None
    offsets_b: list | None = None
    family_spec: Any = None
    q_vectors: list[tuple[Fraction, ...]] = field(default_factory=list)
    functions: list[BoxIndicator] | None = None
    raw: dict = field(default_factory=dict)

    def family(self, override: str | None = None) -> SubspaceFamily:
        spec = override if override is not None else self.family_spec
        return resolve_family(self.config, spec)


def resolve_family(config: ProjectionConfig, spec: Any) -> SubspaceFamily:
    if spec is None:
        return default_family(config)
    if spec == "coords":
        return SubspaceFamily.coordinate(config.n)
    if spec == "heuristic":
        return SubspaceFamily.heuristic(config)
    if isinstance(spec, str) and spec.startswith("file:"):
        path = Path(spec[5:])
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read family file: {exc}", "family") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{exc.msg}", f"{path}:line {exc.lineno}") from None
        return resolve_family(config, data)
    if isinstance(spec, dict) and "subspaces" in spec:
        subs = [parse_subspace(s, config.n, f"family.subspaces[{i}]") for i, s in enumerate(spec["subspaces"])]
        return SubspaceFamily.from_subspaces(subs)
    raise ConfigError(f"unknown family {spec!r}", "family")


def parse_config(data: Any) -> ConfigFile:
    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    unknown = sorted(set(data) - TOP_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys {unknown}")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ConfigError("n must be a positive integer", "n")
    projs = data.get("projections")
    if not isinstance(projs, list) or not projs:
        raise ConfigError("projections must be a nonempty list", "projections")
    subs = tuple(parse_subspace(p, n, f"projections[{i}]") for i, p in enumerate(projs))
    if "m" in data and data["m"] != len(subs):
        raise ConfigError(f"m={data['m']} but {len(subs)} projections given", "m")
    config = ProjectionConfig(n, subs)
    m2 = 2 * config.m

    out = ConfigFile(config, name=data.get("name"), raw=data)
    if "offsets" in data:
        offs = data["offsets"]
        if not isinstance(offs, dict):
            raise ConfigError('expected {"a": [...], "b": [...]}', "offsets")
        for key in ("a", "b"):
            vecs = offs.get(key)
            if vecs is None:
                parsed = [tuple(Fraction(0) for _ in range(n))] * m2
            else:
                if not isinstance(vecs, list) or len(vecs) != m2:
                    raise ConfigError(f"expected {m2} vectors", f"offsets.{key}")
                parsed = [parse_vector(v, n, f"offsets.{key}[{k}]") for k, v in enumerate(vecs)]
            for k, v in enumerate(parsed):
                proj = config.projections[k % config.m]
                if any(proj @ v):
                    raise ConfigError(
                        f"offset must be orthogonal to V_{k % config.m + 1}", f"offsets.{key}[{k}]"
                    )
            setattr(out, f"offsets_{key}", parsed)
    if "family" in data:
        out.family_spec = data["family"]
        resolve_family(config, data["family"])
    for i, vec in enumerate(data.get("exponents", [])):
        out.q_vectors.append(parse_vector(vec, m2, f"exponents[{i}]", parse_p_entry))
    for i, vec in enumerate(data.get("q", [])):
        out.q_vectors.append(parse_vector(vec, m2, f"q[{i}]", parse_q_entry))
    if "functions" in data:
        out.functions = parse_functions(data["functions"], config)
    return out


def parse_functions(specs: Any, config: ProjectionConfig) -> list[BoxIndicator]:
    m2 = 2 * config.m
    if not isinstance(specs, list) or len(specs) != m2:
        raise ConfigError(f"expected {m2} function specs", "functions")
    out = []
    for k, spec in enumerate(specs):
        where = f"functions[{k}]"
        dim = config.subspaces[k % config.m].dim + config.n + 1
        if spec == {"zero": True}:
            out.append(BoxIndicator.zero())
            continue
        if not isinstance(spec, dict) or set(spec) != {"lower", "upper"}:
            raise ConfigError('expected {"lower": [...], "upper": [...]} or {"zero": true}', where)
        lo = parse_vector(spec["lower"], dim, f"{where}.lower", _parse_bound)
        hi = parse_vector(spec["upper"], dim, f"{where}.upper", _parse_bound)
        out.append(BoxIndicator(tuple(float(v) for v in lo), tuple(float(v) for v in hi)))
    return out


def _parse_bound(value: Any, where: str) -> Fraction:
    if value is None or (isinstance(value, str) and "inf" in value.lower()):
        raise ConfigError("unbounded box support", where)
    return parse_rational(value, where)


def load_config(path: str | Path) -> ConfigFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, f"{path}:line {exc.lineno} column {exc.colno}") from None
    return parse_config(data)
