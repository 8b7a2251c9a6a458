"""System model: catalog components, fractions, architectures and stages.

Money is in k$, mass in kg. Buses and tech-packages are ordinary catalog
components (with a failure distribution and usually no obsolescence), so a
single composition rule covers every constituent of a fraction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Mapping

from archval.errors import CatalogError, ParameterError
from archval.stochastic import LifetimeDistribution


class ModularityStage(IntEnum):
    M0 = 0  # integral
    M1 = 1  # decomposable, not swappable
    M2 = 2  # modular monolith with standard interfaces
    M3 = 3  # static distributed (fixed client/server allocation)
    M4 = 4  # dynamic distributed resource sharing

    @classmethod
    def parse(cls, value: str | int | ModularityStage) -> ModularityStage:
        if isinstance(value, cls):
            return value
        if isinstance(value, int):
            return cls(value)
        try:
            return cls[str(value).strip().upper()]
        except KeyError:
            raise ParameterError(f"unknown modularity stage {value!r}") from None

    @property
    def monolithic(self) -> bool:
        return self <= ModularityStage.M2


@dataclass(frozen=True)
class ComponentSpec:
    name: str
    cost: float
    mass: float
    failure: LifetimeDistribution
    obsolescence: LifetimeDistribution | None = None

    def __post_init__(self):
        if self.cost < 0:
            raise ParameterError(f"component {self.name!r}: cost must be >= 0, got {self.cost}")
        if self.mass < 0:
            raise ParameterError(f"component {self.name!r}: mass must be >= 0, got {self.mass}")


@dataclass(frozen=True)
class FractionSpec:
    components: tuple[str, ...]
    bus: str
    tech_package: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))


@dataclass(frozen=True)
class ArchitectureSpec:
    """A named set of fractions.

    ``stage`` is an optional annotation; when omitted it is inferred by
    :func:`stage_of`. ``benefit_rate`` (k$/year) is a revenue hook that is
    zero under the equal-benefit assumption.
    """

    name: str
    fractions: tuple[FractionSpec, ...]
    stage: ModularityStage | None = None
    benefit_rate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "fractions", tuple(self.fractions))
        if self.stage is not None:
            object.__setattr__(self, "stage", ModularityStage.parse(self.stage))


@dataclass(frozen=True)
class Catalog:
    """Components, buses and tech-packages, each keyed by unique name."""

    components: Mapping[str, ComponentSpec] = field(default_factory=dict)
    buses: Mapping[str, ComponentSpec] = field(default_factory=dict)
    tech_packages: Mapping[str, ComponentSpec] = field(default_factory=dict)

    @classmethod
    def from_specs(
        cls,
        components: Iterable[ComponentSpec] = (),
        buses: Iterable[ComponentSpec] = (),
        tech_packages: Iterable[ComponentSpec] = (),
    ) -> Catalog:
        sections = {}
        seen: set[str] = set()
        for label, specs in (("components", components), ("buses", buses), ("tech_packages", tech_packages)):
            table = {}
            for spec in specs:
                if spec.name in seen:
                    raise ParameterError(f"duplicate catalog name {spec.name!r}")
                seen.add(spec.name)
                table[spec.name] = spec
            sections[label] = table
        return cls(**sections)

    def component(self, name: str) -> ComponentSpec:
        return self._get(self.components, "component", name)

    def bus(self, name: str) -> ComponentSpec:
        return self._get(self.buses, "bus", name)

    def tech_package(self, name: str) -> ComponentSpec:
        return self._get(self.tech_packages, "tech-package", name)

    @staticmethod
    def _get(table, what, name):
        try:
            return table[name]
        except KeyError:
            raise CatalogError(f"unknown {what} {name!r}") from None

    def all_specs(self) -> list[ComponentSpec]:
        return [*self.components.values(), *self.buses.values(), *self.tech_packages.values()]


def fraction_members(fraction: FractionSpec, catalog: Catalog) -> list[ComponentSpec]:
    """Resolved constituents in a fixed order: components, bus, tech-package."""
    members = [catalog.component(n) for n in fraction.components]
    members.append(catalog.bus(fraction.bus))
    if fraction.tech_package is not None:
        members.append(catalog.tech_package(fraction.tech_package))
    return members


def deployment_cost(fraction: FractionSpec, catalog: Catalog, launch_rate: float) -> float:
    """Build cost plus ``launch_rate`` (k$/kg) times total mass, in k$."""
    if launch_rate < 0:
        raise ParameterError(f"launch_rate must be >= 0, got {launch_rate}")
    members = fraction_members(fraction, catalog)
    build = sum(m.cost for m in members)
    mass = sum(m.mass for m in members)
    return build + launch_rate * mass


def validate(
    arch: ArchitectureSpec,
    catalog: Catalog,
    required_subsystems: Iterable[str] | None = None,
) -> list[str]:
    """Return human-readable problems with ``arch``; empty when it is sound."""
    issues: list[str] = []
    where = f"architecture {arch.name!r}"
    if not arch.fractions:
        issues.append(f"{where}: needs at least one fraction")

    owner: dict[str, int] = {}
    for j, fraction in enumerate(arch.fractions, start=1):
        if not fraction.components:
            issues.append(f"{where}, fraction {j}: has no components")
        for name in fraction.components:
            if name not in catalog.components:
                issues.append(f"{where}, fraction {j}: unknown component {name!r}")
        if fraction.bus not in catalog.buses:
            issues.append(f"{where}, fraction {j}: unknown bus {fraction.bus!r}")
        if fraction.tech_package is not None and fraction.tech_package not in catalog.tech_packages:
            issues.append(f"{where}, fraction {j}: unknown tech-package {fraction.tech_package!r}")
        # Tech-packages are meant to repeat across fractions; components and buses are not.
        for name in (*fraction.components, fraction.bus):
            if name in owner:
                if owner[name] == j:
                    issues.append(f"{where}: {name!r} listed twice in fraction {j}")
                else:
                    issues.append(f"{where}: {name!r} appears in fractions {owner[name]} and {j}")
            else:
                owner[name] = j

    if arch.stage is not None and arch.fractions:
        n = len(arch.fractions)
        if arch.stage.monolithic and n != 1:
            issues.append(f"{where}: stage {arch.stage.name} requires exactly one fraction")
        elif not arch.stage.monolithic and n < 2:
            issues.append(f"{where}: stage {arch.stage.name} requires at least two fractions")

    if required_subsystems is not None:
        covered = {n for f in arch.fractions for n in f.components}
        missing = [s for s in required_subsystems if s not in covered]
        if missing:
            issues.append(f"{where}: does not carry required subsystems {missing}")
    return issues


def stage_of(arch: ArchitectureSpec) -> ModularityStage:
    """Annotated stage if present; otherwise M2 for one fraction, M3 for several."""
    if arch.stage is not None:
        return arch.stage
    return ModularityStage.M2 if len(arch.fractions) == 1 else ModularityStage.M3
