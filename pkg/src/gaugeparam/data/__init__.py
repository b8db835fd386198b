"""Bundled graph fixtures and the seeded coupling-rule table."""

from importlib import resources


def graph_text(name: str) -> str:
    return resources.files(__package__).joinpath("graphs", f"{name}.graph").read_text(encoding="utf-8")


def graph_names() -> list[str]:
    return sorted(p.name[:-6] for p in resources.files(__package__).joinpath("graphs").iterdir() if p.name.endswith(".graph"))


def load(name: str):
    from ..graph import parse_graph

    return parse_graph(graph_text(name))


def rules_text() -> str:
    return resources.files(__package__).joinpath("standard_model.rules").read_text(encoding="utf-8")
