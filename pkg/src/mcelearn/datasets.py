"""Small public graphs shipped with the package."""

from __future__ import annotations

from importlib import resources

from .graph import Graph, load_edge_list

BUNDLED = {
    "karate": "Zachary's karate club (34 vertices, 78 edges)",
    "lesmis": "Les Miserables character co-appearances (77 vertices, 254 edges)",
}


def bundled_path(name: str):
    if name not in BUNDLED:
        raise ValueError(f"unknown bundled graph {name!r}; choose from {sorted(BUNDLED)}")
    return resources.files("mcelearn") / "data" / f"{name}.txt"


def load_bundled(name: str) -> Graph:
    with bundled_path(name).open() as fh:
        return load_edge_list(fh)
