"""This module provides the `design_fixture` and `scenario_fixture` fixture factories."""
from pathlib import Path
from typing import Callable, Literal, Union

from pytest import fixture

from mixfb.config import Config
from mixfb.lmi import DesignResult
from mixfb.loop import ClosedLoopSystem

_Scope = Literal["session", "package", "module", "class", "function"]


def _load(config: Union[Path, str, Config]) -> Config:
    if isinstance(config, Config):
        return config
    return Config.from_path(Path(config))


def design_fixture(
    config: Union[Path, str, Config],
    kind: str = "nominal",
    scope: _Scope = "module",
) -> Callable:
    """Create a fixture that solves a design once and returns the :class:`DesignResult`.

    Args:
        config: A configuration, or the path of a JSON configuration file.
        kind: ``nominal``, ``parametric``, ``robust`` or ``passive``.
        scope: Pytest fixture scope.

    Returns:
        A design fixture for use with pytest.
    """  # noqa: D202

    @fixture(scope=scope)
    def _design_fixture() -> DesignResult:
        return _load(config).design(kind)

    return _design_fixture


def scenario_fixture(
    config: Union[Path, str, Config],
    scope: _Scope = "module",
) -> Callable:
    """Create a fixture that assembles the configured closed loop at its ``(k, beta)``.

    Args:
        config: A configuration, or the path of a JSON configuration file.
        scope: Pytest fixture scope.

    Returns:
        A closed-loop fixture for use with pytest.
    """  # noqa: D202

    @fixture(scope=scope)
    def _scenario_fixture() -> ClosedLoopSystem:
        return _load(config).closed_loop()

    return _scenario_fixture
