"""Exact symbolic kernel: polynomials, rational functions, tensors, exponentials."""

from .expression import Expression, IncompleteRouting, quadric
from .laurent import UnsupportedExpansion, laurent_res_reg, principal_part, regular_part, residue
from .poly import Poly, natural_key
from .quadric import Quadric, make_pair
from .rational import Rat, factor_poly
from .render import from_json, render, to_json
from .tensor import MalformedExpression, SPACETIME_DIM, dot, metric, mom, token


def normalize(expr: Expression) -> Expression:
    """Canonical form; expressions are canonical on construction, so this only contracts."""
    return expr.contract()


def contract_indices(expr: Expression) -> Expression:
    return expr.contract()


def differentiate(expr: Expression, slot: str, index: str) -> Expression:
    return expr.differentiate(slot, index)


def substitute_momenta(expr: Expression, routing, independent=()) -> Expression:
    return expr.substitute_momenta(routing, independent)


__all__ = [
    "Expression", "IncompleteRouting", "MalformedExpression", "Poly", "Quadric", "Rat",
    "SPACETIME_DIM", "UnsupportedExpansion", "contract_indices", "differentiate", "dot",
    "factor_poly", "from_json", "laurent_res_reg", "make_pair", "metric", "mom", "natural_key",
    "normalize", "principal_part", "quadric", "regular_part", "render", "residue",
    "substitute_momenta", "to_json", "token",
]
