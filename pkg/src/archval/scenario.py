"""Scenario files: parsing, validation, overrides and serialization.

A scenario is one JSON document holding the simulation settings, the
component catalog, named architectures and, optionally, named variants
(override sets), sweep definitions and an environment model. Unknown keys
are rejected everywhere so that a typo in a reliability parameter cannot
slip through silently.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

import jsonschema

from archval.architecture import (
    ArchitectureSpec,
    Catalog,
    ComponentSpec,
    FractionSpec,
    ModularityStage,
    validate,
)
from archval.environment import EnvironmentModel
from archval.errors import ArchvalError, ConfigError, ScenarioError
from archval.renewal import SimulationConfig
from archval.stochastic import (
    LifetimeDistribution,
    LognormalMoments,
    PointMass,
    Weibull,
    distribution_from_dict,
    weibull_scale_from_mean,
)

_NUM = {"type": "number"}
_NAME = {"type": "string", "minLength": 1}


def _dist_branch(kind: str, params: list[str]) -> dict:
    return {
        "if": {"properties": {"kind": {"const": kind}}},
        "then": {
            "properties": {"kind": {}, **{p: _NUM for p in params}},
            "required": params,
            "additionalProperties": False,
        },
    }


_DISTRIBUTION = {
    "type": "object",
    "required": ["kind"],
    "properties": {"kind": {"enum": ["weibull", "lognormal_moments", "point_mass"]}},
    "allOf": [
        _dist_branch("weibull", ["scale", "shape"]),
        _dist_branch("lognormal_moments", ["mean", "sd"]),
        _dist_branch("point_mass", ["time"]),
    ],
}

_COMPONENT = {
    "type": "object",
    "required": ["name", "cost", "mass", "failure"],
    "additionalProperties": False,
    "properties": {
        "name": _NAME,
        "cost": _NUM,
        "mass": _NUM,
        "failure": _DISTRIBUTION,
        "obsolescence": _DISTRIBUTION,
    },
}

_ENVIRONMENT = {
    "type": "object",
    "required": ["parameters"],
    "additionalProperties": False,
    "properties": {
        "parameters": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "levels"],
                "additionalProperties": False,
                "properties": {"name": _NAME, "levels": {"type": "array", "items": {"type": "string"}}},
            },
        },
        "stakeholders": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["requirements"],
                "additionalProperties": False,
                "properties": {
                    "requirements": {
                        "type": "array",
                        "items": {
                            "type": "array",
                            "items": {"type": "object", "additionalProperties": {"type": "string"}},
                        },
                    }
                },
            },
        },
        "discount": _NUM,
    },
}

SCHEMA = {
    "type": "object",
    "required": ["simulation", "components", "buses", "architectures"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "simulation": {
            "type": "object",
            "required": ["lifetime", "discount_rate", "launch_rate", "runs", "seed"],
            "additionalProperties": False,
            "properties": {
                "lifetime": _NUM,
                "discount_rate": _NUM,
                "launch_rate": _NUM,
                "runs": {"type": "integer"},
                "seed": {"type": "integer"},
                "trajectory_grid": {"type": "array", "items": _NUM},
                "coupling": {"enum": ["common", "independent"]},
            },
        },
        "subsystems": {"type": "array", "items": _NAME},
        "components": {"type": "array", "items": _COMPONENT},
        "buses": {"type": "array", "items": _COMPONENT},
        "tech_package": {"type": "array", "items": _COMPONENT},
        "architectures": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "fractions"],
                "additionalProperties": False,
                "properties": {
                    "name": _NAME,
                    "stage": {"enum": [s.name for s in ModularityStage]},
                    "benefit_rate": _NUM,
                    "fractions": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["components", "bus"],
                            "additionalProperties": False,
                            "properties": {
                                "components": {"type": "array", "items": _NAME},
                                "bus": _NAME,
                                "tech_package": _NAME,
                            },
                        },
                    },
                },
            },
        },
        "variants": {
            "type": "object",
            "additionalProperties": {"type": "object", "additionalProperties": _NUM},
        },
        "sweeps": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "from", "to", "param", "values"],
                "additionalProperties": False,
                "properties": {
                    "name": _NAME,
                    "from": _NAME,
                    "to": _NAME,
                    "param": _NAME,
                    "values": {"type": "array", "items": _NUM, "minItems": 1},
                    "param2": _NAME,
                    "values2": {"type": "array", "items": _NUM, "minItems": 1},
                    "runs": {"type": "integer"},
                },
            },
        },
        "environment": _ENVIRONMENT,
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)
_ENV_VALIDATOR = jsonschema.Draft202012Validator(_ENVIRONMENT)

_SECTIONS = {"components": "components", "buses": "buses", "tech_package": "tech_packages"}


@dataclass(frozen=True)
class SweepSpec:
    name: str
    source: str
    target: str
    param: str
    values: tuple[float, ...]
    param2: str | None = None
    values2: tuple[float, ...] | None = None
    runs: int | None = None


@dataclass(frozen=True)
class Scenario:
    config: SimulationConfig
    catalog: Catalog
    architectures: Mapping[str, ArchitectureSpec]
    name: str = "scenario"
    description: str = ""
    subsystems: tuple[str, ...] | None = None
    variants: Mapping[str, Mapping[str, float]] = field(default_factory=dict)
    sweeps: tuple[SweepSpec, ...] = ()
    environment: EnvironmentModel | None = None

    def architecture(self, name: str) -> ArchitectureSpec:
        try:
            return self.architectures[name]
        except KeyError:
            known = ", ".join(self.architectures)
            raise ConfigError(f"unknown architecture {name!r} (known: {known})") from None

    def sweep(self, name: str) -> SweepSpec:
        for s in self.sweeps:
            if s.name == name:
                return s
        raise ConfigError(f"unknown sweep {name!r}")

    def variant(self, name: str) -> Scenario:
        try:
            overrides = self.variants[name]
        except KeyError:
            raise ConfigError(f"unknown variant {name!r}") from None
        return self.with_overrides(overrides)

    def with_config(self, **changes: Any) -> Scenario:
        return dataclasses.replace(self, config=dataclasses.replace(self.config, **changes))

    def with_overrides(self, overrides: Mapping[str, float]) -> Scenario:
        """Copy with numeric fields replaced, addressed by dotted parameter path.

        Paths: ``simulation.<field>``, ``<section>.<name>.cost|mass``,
        ``<section>.<name>.failure|obsolescence.<param>`` and
        ``architectures.<name>.benefit_rate``. ``<param>`` is a parameter of
        the distribution or ``mean``; a Weibull ``mean`` is converted to scale
        at the current shape, so mean overrides are applied last.
        """
        out = self
        ordered = sorted(overrides.items(), key=lambda kv: kv[0].endswith(".mean"))
        for path, value in ordered:
            out = out._override(path, value)
        return out

    def _override(self, path: str, value: float) -> Scenario:
        parts = path.split(".")
        head = parts[0]
        if head == "simulation" and len(parts) == 2:
            fld = parts[1]
            if fld not in ("lifetime", "discount_rate", "launch_rate", "runs", "seed"):
                raise ConfigError(f"cannot override simulation field {fld!r} in {path!r}")
            if fld in ("runs", "seed"):
                value = int(value)
            try:
                return self.with_config(**{fld: value})
            except ConfigError as exc:
                raise ConfigError(f"{path}: {exc}") from None
        if head == "architectures" and len(parts) == 3 and parts[2] == "benefit_rate":
            arch = self.architecture(parts[1])
            archs = dict(self.architectures)
            archs[arch.name] = dataclasses.replace(arch, benefit_rate=float(value))
            return dataclasses.replace(self, architectures=archs)
        if head in _SECTIONS and len(parts) in (3, 4):
            table = dict(getattr(self.catalog, _SECTIONS[head]))
            name = parts[1]
            if name not in table:
                raise ConfigError(f"{path}: no entry {name!r} in {head}")
            spec = table[name]
            try:
                if len(parts) == 3 and parts[2] in ("cost", "mass"):
                    spec = dataclasses.replace(spec, **{parts[2]: value})
                elif len(parts) == 4 and parts[2] in ("failure", "obsolescence"):
                    dist = getattr(spec, parts[2])
                    if dist is None:
                        raise ConfigError(f"{path}: {name!r} has no {parts[2]} distribution")
                    spec = dataclasses.replace(spec, **{parts[2]: _with_param(dist, parts[3], value, path)})
                else:
                    raise ConfigError(f"cannot resolve parameter path {path!r}")
            except ArchvalError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"{path}: {exc}") from None
            table[name] = spec
            catalog = dataclasses.replace(self.catalog, **{_SECTIONS[head]: table})
            return dataclasses.replace(self, catalog=catalog)
        raise ConfigError(f"cannot resolve parameter path {path!r}")

    def issues(self) -> list[str]:
        """Every cross-reference problem, across all sections."""
        out = []
        for arch in self.architectures.values():
            out += validate(arch, self.catalog, self.subsystems)
        if self.subsystems is not None:
            for s in self.subsystems:
                if s not in self.catalog.components:
                    out.append(f"subsystems: {s!r} is not a catalog component")
        for vname, overrides in self.variants.items():
            try:
                self.with_overrides(overrides)
            except ArchvalError as exc:
                out.append(f"variant {vname!r}: {exc}")
        for sweep in self.sweeps:
            for ref in (sweep.source, sweep.target):
                if ref not in self.architectures:
                    out.append(f"sweep {sweep.name!r}: unknown architecture {ref!r}")
            if (sweep.param2 is None) != (sweep.values2 is None):
                out.append(f"sweep {sweep.name!r}: param2 and values2 go together")
            if sweep.runs is not None and sweep.runs < 1:
                out.append(f"sweep {sweep.name!r}: runs must be >= 1")
            probes = {sweep.param: sweep.values[0]}
            if sweep.param2 is not None and sweep.values2:
                probes[sweep.param2] = sweep.values2[0]
            try:
                self.with_overrides(probes)
            except ArchvalError as exc:
                out.append(f"sweep {sweep.name!r}: {exc}")
        return out

    def to_dict(self) -> dict[str, Any]:
        cfg = self.config
        sim: dict[str, Any] = {
            "lifetime": _num(cfg.lifetime),
            "discount_rate": _num(cfg.discount_rate),
            "launch_rate": _num(cfg.launch_rate),
            "runs": cfg.runs,
            "seed": cfg.seed,
        }
        if cfg.trajectory_grid is not None:
            sim["trajectory_grid"] = [_num(g) for g in cfg.trajectory_grid]
        if cfg.coupling != "common":
            sim["coupling"] = cfg.coupling
        out: dict[str, Any] = {"name": self.name}
        if self.description:
            out["description"] = self.description
        out["simulation"] = sim
        if self.subsystems is not None:
            out["subsystems"] = list(self.subsystems)
        for key, attr in _SECTIONS.items():
            specs = getattr(self.catalog, attr).values()
            if specs or key != "tech_package":
                out[key] = [_component_dict(s) for s in specs]
        out["architectures"] = [_architecture_dict(a) for a in self.architectures.values()]
        if self.variants:
            out["variants"] = {k: {p: _num(v) for p, v in o.items()} for k, o in self.variants.items()}
        if self.sweeps:
            out["sweeps"] = [_sweep_dict(s) for s in self.sweeps]
        if self.environment is not None:
            out["environment"] = self.environment.to_dict()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _with_param(dist: LifetimeDistribution, param: str, value: float, path: str) -> LifetimeDistribution:
    if isinstance(dist, Weibull):
        if param == "scale":
            return Weibull(value, dist.shape)
        if param == "shape":
            return Weibull(dist.scale, value)
        if param == "mean":
            return Weibull(weibull_scale_from_mean(value, dist.shape), dist.shape)
    elif isinstance(dist, LognormalMoments):
        if param == "mean":
            return LognormalMoments(value, dist.moment_sd)
        if param == "sd":
            return LognormalMoments(dist.moment_mean, value)
    elif isinstance(dist, PointMass):
        if param in ("time", "mean"):
            return PointMass(value)
    raise ConfigError(f"{path}: {dist.kind} has no parameter {param!r}")


def _num(x: float) -> int | float:
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def _dist_dict(d: LifetimeDistribution) -> dict[str, Any]:
    return {k: (_num(v) if isinstance(v, float) else v) for k, v in d.to_dict().items()}


def _component_dict(c: ComponentSpec) -> dict[str, Any]:
    out = {"name": c.name, "cost": _num(c.cost), "mass": _num(c.mass), "failure": _dist_dict(c.failure)}
    if c.obsolescence is not None:
        out["obsolescence"] = _dist_dict(c.obsolescence)
    return out


def _architecture_dict(a: ArchitectureSpec) -> dict[str, Any]:
    out: dict[str, Any] = {"name": a.name}
    if a.stage is not None:
        out["stage"] = a.stage.name
    if a.benefit_rate:
        out["benefit_rate"] = _num(a.benefit_rate)
    fracs = []
    for f in a.fractions:
        fd: dict[str, Any] = {"components": list(f.components), "bus": f.bus}
        if f.tech_package is not None:
            fd["tech_package"] = f.tech_package
        fracs.append(fd)
    out["fractions"] = fracs
    return out


def _sweep_dict(s: SweepSpec) -> dict[str, Any]:
    out: dict[str, Any] = {
        "name": s.name,
        "from": s.source,
        "to": s.target,
        "param": s.param,
        "values": [_num(v) for v in s.values],
    }
    if s.param2 is not None:
        out["param2"] = s.param2
        out["values2"] = [_num(v) for v in (s.values2 or ())]
    if s.runs is not None:
        out["runs"] = s.runs
    return out


def _schema_issues(validator: jsonschema.Validator, data: Any) -> list[str]:
    issues = []
    for err in validator.iter_errors(data):
        where = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path).lstrip(".")
        issues.append(f"{where or '<root>'}: {err.message}")
    return sorted(issues)


def _components(entries: Iterable[Mapping[str, Any]], section: str, issues: list[str]) -> list[ComponentSpec]:
    specs = []
    for i, e in enumerate(entries):
        name = e["name"]
        where = f"{section} {name!r}"
        ok = True
        for fld in ("cost", "mass"):
            if e[fld] < 0:
                issues.append(f"{where}: {fld} must be >= 0, got {e[fld]}")
                ok = False
        dists = {}
        for fld in ("failure", "obsolescence"):
            if fld in e:
                try:
                    dists[fld] = distribution_from_dict(e[fld])
                except ArchvalError as exc:
                    issues.append(f"{where}: {fld}: {exc}")
                    ok = False
        if ok:
            specs.append(ComponentSpec(name, e["cost"], e["mass"], dists["failure"], dists.get("obsolescence")))
    return specs


def scenario_from_dict(data: Any, source: str = "<scenario>") -> Scenario:
    """Validate ``data`` and build a scenario; all problems are reported together."""
    issues = _schema_issues(_VALIDATOR, data)
    if issues:
        raise ScenarioError(f"{source}: scenario does not match the schema", issues)

    comps = _components(data["components"], "component", issues)
    buses = _components(data["buses"], "bus", issues)
    tps = _components(data.get("tech_package", []), "tech-package", issues)
    names = [e["name"] for key in _SECTIONS for e in data.get(key, [])]
    for dup in sorted({n for n in names if names.count(n) > 1}):
        issues.append(f"catalog name {dup!r} is used more than once")

    sim = data["simulation"]
    config = None
    try:
        config = SimulationConfig(
            lifetime=sim["lifetime"],
            discount_rate=sim["discount_rate"],
            launch_rate=sim["launch_rate"],
            runs=sim["runs"],
            seed=sim["seed"],
            trajectory_grid=sim.get("trajectory_grid"),
            coupling=sim.get("coupling", "common"),
        )
        config.grid()
    except ConfigError as exc:
        issues.append(f"simulation: {exc}")

    archs: dict[str, ArchitectureSpec] = {}
    for a in data["architectures"]:
        if a["name"] in archs:
            issues.append(f"architecture name {a['name']!r} is used more than once")
        fracs = tuple(FractionSpec(tuple(f["components"]), f["bus"], f.get("tech_package")) for f in a["fractions"])
        archs[a["name"]] = ArchitectureSpec(a["name"], fracs, a.get("stage"), float(a.get("benefit_rate", 0.0)))

    env = None
    if "environment" in data:
        try:
            env = EnvironmentModel.from_dict(data["environment"])
        except ArchvalError as exc:
            issues.append(f"environment: {exc}")

    sweeps = tuple(
        SweepSpec(
            s["name"], s["from"], s["to"], s["param"], tuple(s["values"]),
            s.get("param2"), tuple(s["values2"]) if "values2" in s else None, s.get("runs"),
        )
        for s in data.get("sweeps", [])
    )

    if issues:
        raise ScenarioError(f"{source}: invalid scenario", issues)
    try:
        catalog = Catalog.from_specs(comps, buses, tps)
    except ArchvalError as exc:
        raise ScenarioError(f"{source}: invalid scenario", [str(exc)]) from None
    scenario = Scenario(
        config=config,
        catalog=catalog,
        architectures=archs,
        name=data.get("name", Path(source).stem),
        description=data.get("description", ""),
        subsystems=tuple(data["subsystems"]) if "subsystems" in data else None,
        variants={k: dict(v) for k, v in data.get("variants", {}).items()},
        sweeps=sweeps,
        environment=env,
    )
    issues = scenario.issues()
    if issues:
        raise ScenarioError(f"{source}: invalid scenario", issues)
    return scenario


def _read_json(path: Path) -> Any:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read file: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def bundled_names() -> list[str]:
    return sorted(p.name[: -len(".json")] for p in resources.files("archval.data").iterdir() if p.name.endswith(".json"))


def resolve_path(path: str | Path) -> Path:
    """A real file if it exists, else a bundled fixture matching the file stem."""
    p = Path(path)
    if p.exists():
        return p
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in bundled_names():
        return Path(str(resources.files("archval.data").joinpath(stem + ".json")))
    return p


def load_scenario(path: str | Path) -> Scenario:
    p = resolve_path(path)
    return scenario_from_dict(_read_json(p), str(p))


def parse_scenario(text: str, source: str = "<string>") -> Scenario:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(data, source)


def load_environment(path: str | Path) -> EnvironmentModel:
    """Environment from a full scenario file or from a bare environment document."""
    p = resolve_path(path)
    data = _read_json(p)
    if isinstance(data, dict) and "parameters" in data:
        issues = _schema_issues(_ENV_VALIDATOR, data)
        if issues:
            raise ScenarioError(f"{p}: environment does not match the schema", issues)
        try:
            return EnvironmentModel.from_dict(data)
        except ArchvalError as exc:
            raise ScenarioError(f"{p}: invalid environment", [str(exc)]) from None
    scenario = scenario_from_dict(data, str(p))
    if scenario.environment is None:
        raise ScenarioError(f"{p}: scenario has no environment section")
    return scenario.environment


def f6_demo() -> Scenario:
    """The bundled fractionated-spacecraft demonstration scenario."""
    return load_scenario("f6_demo")
