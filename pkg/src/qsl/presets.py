"""Closed-form input corpus used by the CLI and the test suite."""

import math

from .wiener import ExpSum

_BUILDERS = {}


def _register(name):
    def deco(fn):
        _BUILDERS[name] = fn
        return fn
    return deco


@_register("sin")
def sine_lattice() -> ExpSum:
    """e^{pi i z} - e^{-pi i z} = 2i sin(pi z); zeros exactly at the integers."""
    return ExpSum.from_terms([(-0.5, -1.0), (0.5, 1.0)])


@_register("cos")
def cosine_lattice() -> ExpSum:
    """e^{pi i z} + e^{-pi i z} = 2 cos(pi z); zeros at half-integers."""
    return ExpSum.from_terms([(-0.5, 1.0), (0.5, 1.0)])


@_register("cos3")
def cosine_plus_three() -> ExpSum:
    """2 cos(2 pi z) + 3; zero columns k + 1/2 +- i acosh(3/2)/(2 pi)."""
    return ExpSum.from_terms([(-1.0, 1.0), (0.0, 3.0), (1.0, 1.0)])


@_register("threefreq")
def three_frequency() -> ExpSum:
    """2i sin(pi z) + 0.3 e^{pi i sqrt2 z}; incommensurable perturbation."""
    return ExpSum.from_terms([(-0.5, -1.0), (0.5, 1.0),
                              (0.5 * math.sqrt(2.0), 0.3)])


PRESETS = tuple(sorted(_BUILDERS))


def preset(name: str) -> ExpSum:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}") from None
