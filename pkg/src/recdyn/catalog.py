"""Built-in benchmark systems addressable from experiment configs."""

from __future__ import annotations

from fractions import Fraction

from .contfrac import GOLDEN_THETA
from .spaces import (
    DoublingSystem,
    DynSystem,
    FiniteSpace,
    FiniteSystem,
    RotationSystem,
    n_fold,
)


def _build_rotation(params: dict) -> DynSystem:
    return RotationSystem(params.get("theta", GOLDEN_THETA))


def _build_doubling(params: dict) -> DynSystem:
    return DoublingSystem()


def _build_finite(params: dict) -> DynSystem:
    table = params.get("map")
    if table is None:
        raise ValueError("finite system needs a 'map' image table")
    space = FiniteSpace(len(table), params.get("matrix"))
    return FiniteSystem(space, table)


def _build_identity(params: dict) -> DynSystem:
    size = params.get("size", 2)
    return FiniteSystem(FiniteSpace(size), list(range(size)))


def _build_cycle(params: dict) -> DynSystem:
    length = params.get("length", 3)
    return FiniteSystem(FiniteSpace(length),
                        [(i + 1) % length for i in range(length)])


def _build_wandering(params: dict) -> DynSystem:
    # absorbing two-state map: 0 leaves and never comes back
    return FiniteSystem(FiniteSpace(2), [1, 1])


def _build_halfline(params: dict) -> DynSystem:
    # i -> i+1 on a path truncated at the far end, the classic
    # non-recurrent probe
    length = params.get("length", 16)
    if length < 2:
        raise ValueError("halfline needs at least two states")
    return FiniteSystem(FiniteSpace(length),
                        [min(i + 1, length - 1) for i in range(length)])


def _build_product(params: dict) -> DynSystem:
    base = params.get("base")
    copies = params.get("copies", 2)
    if base is None:
        raise ValueError("product needs a 'base' system spec")
    return n_fold(build_system(base.get("name"), base.get("params", {})),
                  copies)


_CATALOG = {
    "rotation": (_build_rotation, "theta (default golden mean)",
                 "circle rotation x -> x + theta"),
    "doubling": (_build_doubling, "none",
                 "circle doubling x -> 2x mod 1, exact rationals"),
    "finite": (_build_finite, "map: [..], matrix: optional",
               "finite space with an explicit image table"),
    "identity": (_build_identity, "size (default 2)",
                 "identity map, trivially recurrent"),
    "cycle": (_build_cycle, "length (default 3)",
              "cyclic permutation of a finite space"),
    "wandering": (_build_wandering, "none",
                  "two-state absorber [1,1], the non-recurrent control"),
    "halfline": (_build_halfline, "length (default 16)",
                 "translation n -> n+1 on a truncated path"),
    "product": (_build_product, "base: {name, params}, copies: N",
                "N-fold direct product of a base system"),
}


def build_system(name: str, params: dict | None = None) -> DynSystem:
    if name not in _CATALOG:
        raise ValueError(
            f"unknown system {name!r}; available: {', '.join(sorted(_CATALOG))}")
    builder, _, _ = _CATALOG[name]
    return builder(params or {})


def catalog_entries() -> list[tuple[str, str, str]]:
    return [(name, doc, desc)
            for name, (_, doc, desc) in sorted(_CATALOG.items())]


def format_catalog() -> str:
    lines = ["built-in systems:"]
    for name, doc, desc in catalog_entries():
        lines.append(f"  {name:<10} params: {doc}")
        lines.append(f"  {'':<10} {desc}")
    return "\n".join(lines)
