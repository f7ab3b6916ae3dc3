"""One namespace for every built-in rule, whatever its kind."""

from __future__ import annotations

from . import combrule, georule
from .symbolic import ABB_BAB, CHACON, FIBONACCI, NONPISOT, SIERPINSKI

SYMBOLIC = {r.name: r for r in (FIBONACCI, ABB_BAB, NONPISOT, CHACON)}
GRID = {SIERPINSKI.name: SIERPINSKI}
_RESCALED = {
    "fibonacci_product_rescaled": lambda: combrule.fibonacci_product(True),
    "fibonacci_dpv_rescaled": lambda: combrule.fibonacci_dpv(True),
    "nonpisot_product_rescaled": lambda: combrule.nonpisot_product(True),
    "nonpisot_dpv_rescaled": lambda: combrule.nonpisot_dpv(True),
}


def names() -> list[str]:
    return [*SYMBOLIC, *GRID, *georule.builtin_names(), *combrule.builtin_names(), *_RESCALED]


def get(name: str):
    if name in SYMBOLIC:
        return SYMBOLIC[name]
    if name in GRID:
        return GRID[name]
    if name in georule.builtin_names():
        return georule.builtin(name)
    if name in combrule.builtin_names():
        return combrule.builtin(name)
    if name in _RESCALED:
        return _RESCALED[name]()
    raise KeyError(f"unknown builtin {name!r}; known: {', '.join(names())}")
