from __future__ import annotations

import dataclasses

import pytest

from archval.architecture import ArchitectureSpec, Catalog, ComponentSpec, FractionSpec
from archval.scenario import Scenario, f6_demo
from archval.stochastic import LifetimeDistribution, point_mass


@pytest.fixture(scope="session")
def f6() -> Scenario:
    return f6_demo()


def with_all_lifetimes(scenario: Scenario, dist: LifetimeDistribution, obsolescence: bool = False) -> Scenario:
    """Replace every failure law by ``dist``; drop obsolescence unless asked to keep it."""

    def swap(table):
        return {
            name: dataclasses.replace(
                spec, failure=dist, obsolescence=(dist if obsolescence and spec.obsolescence else None)
            )
            for name, spec in table.items()
        }

    cat = scenario.catalog
    catalog = Catalog(swap(cat.components), swap(cat.buses), swap(cat.tech_packages))
    return dataclasses.replace(scenario, catalog=catalog)


def single_fraction_system(dist: LifetimeDistribution, cost: float = 10.0, mass: float = 0.0):
    """One component plus a bus; the bus never fails within any tested horizon."""
    catalog = Catalog.from_specs(
        [ComponentSpec("unit", cost, mass, dist)],
        [ComponentSpec("frame", 0.0, 0.0, point_mass(1e9))],
    )
    arch = ArchitectureSpec("solo", (FractionSpec(("unit",), "frame"),))
    return arch, catalog


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS[number] = (passed, detail)
    print(f"AC{number}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"AC{number:<2} {'PASS' if passed else 'FAIL'}  {detail}")
