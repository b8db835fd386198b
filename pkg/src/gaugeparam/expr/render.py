"""Text, LaTeX and JSON serialisation of expressions.

The JSON layout is::

    {"terms": [{"num": POLY, "den": [[POLY, power], ...],
                "tensors": [[kind, arg, ...], ...],
                "exp": null | {"entries": [[[slot, slot] | [], RAT], ...]}}]}

where ``POLY`` is a list of ``[coefficient, [[symbol, power], ...]]`` and a
coefficient is a decimal string ``"p"`` or ``"p/q"``.  ``RAT`` is
``{"num": POLY, "den": [...]}``.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction

from .expression import Expression
from .poly import Poly, mono_degree, natural_key
from .quadric import Quadric
from .rational import Rat, _factor_sort_key
from .tensor import atom_key

_TEXT_NAMES = {"cos_tW": "cos(tW)", "sin_tW": "sin(tW)"}
_LATEX_NAMES = {
    "cos_tW": r"\cos\theta_W",
    "sin_tW": r"\sin\theta_W",
    "mW": "m_W",
    "mZ": "m_Z",
    "mh": "m_h",
    "g_s": "g_s",
}
_GREEK = {"xi", "mu", "nu", "eta", "rho", "sigma", "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "tau", "psi", "phi"}
_NAME = re.compile(r"^([A-Za-z]+)_?(\w*?)$")


# ---------------------------------------------------------------- names
def sym_text(name: str) -> str:
    return _TEXT_NAMES.get(name, name)


def sym_latex(name: str) -> str:
    if name in _LATEX_NAMES:
        return _LATEX_NAMES[name]
    m = re.match(r"^([A-Za-z]+?)_?(\d+)$", name)
    if m:
        base, sub = m.groups()
        return f"{_latex_base(base)}_{{{sub}}}" if len(sub) > 1 else f"{_latex_base(base)}_{sub}"
    return _latex_base(name)


def _latex_base(base: str) -> str:
    return "\\" + base if base in _GREEK else base


# ---------------------------------------------------------------- polynomials
def _coef_text(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _mono_text(mono, latex: bool) -> str:
    parts = []
    for s, k in mono:
        name = sym_latex(s) if latex else sym_text(s)
        if k == 1:
            parts.append(name)
        else:
            parts.append(f"{name}^{{{k}}}" if latex else f"{name}^{k}")
    return " ".join(parts)


def _poly_pieces(p: Poly, latex: bool) -> list[tuple[int, str]]:
    """Signed display pieces ``(sign, magnitude text)``."""
    out = []
    for mono, c in p.sorted_terms():
        sign = -1 if c < 0 else 1
        mag = abs(c)
        mtext = _mono_text(mono, latex)
        if latex and mag.denominator != 1:
            ctext = f"\\frac{{{mag.numerator}}}{{{mag.denominator}}}"
        else:
            ctext = _coef_text(mag)
        if not mtext:
            body = ctext
        elif mag == 1:
            body = mtext
        else:
            body = f"{ctext} {mtext}"
        out.append((sign, body))
    return out


def _join(pieces: list[tuple[int, str]]) -> str:
    if not pieces:
        return "0"
    s = ("-" if pieces[0][0] < 0 else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        s += (" - " if sign < 0 else " + ") + body
    return s


def poly_text(p: Poly, latex: bool = False) -> str:
    return _join(_poly_pieces(p, latex))


def _factors_text(den, latex: bool) -> str:
    parts = []
    for f, k in den:
        t = poly_text(f, latex)
        if len(f.terms) > 1 and (not latex or len(den) > 1 or k > 1):
            t = f"\\left({t}\\right)" if latex else f"({t})"
        if k > 1:
            t = f"{t}^{{{k}}}" if latex else f"{t}^{k}"
        parts.append(t)
    return " ".join(parts)


def rat_text(r: Rat, latex: bool = False) -> str:
    if not r.den:
        return poly_text(r.num, latex)
    num = poly_text(r.num, latex)
    den = _factors_text(r.den, latex)
    if latex:
        return f"\\frac{{{num}}}{{{den}}}"
    if len(r.num.terms) > 1 or "/" in num:
        num = f"({num})"
    return f"{num}/{_wrap_den(r.den, den)}"


def _wrap_den(den, text: str) -> str:
    if len(den) > 1:
        return f"({text})"
    return text


# ---------------------------------------------------------------- atoms
def atom_text(a, latex: bool = False) -> str:
    kind = a[0]
    if kind == "eta":
        if latex:
            return f"\\eta^{{{sym_latex(a[1])}{sym_latex(a[2])}}}"
        return f"eta^{{{a[1]} {a[2]}}}"
    if kind == "mom":
        if latex:
            return f"{sym_latex(a[1])}^{{{sym_latex(a[2])}}}"
        return f"{a[1]}^{{{a[2]}}}"
    if kind == "dot":
        if a[1] == a[2]:
            return f"{sym_latex(a[1])}^2" if latex else f"{a[1]}^2"
        if latex:
            return f"({sym_latex(a[1])} \\cdot {sym_latex(a[2])})"
        return f"({a[1]}.{a[2]})"
    return a[1]


def _atoms_text(atoms, latex: bool) -> str:
    parts = []
    i = 0
    while i < len(atoms):
        j = i
        while j < len(atoms) and atoms[j] == atoms[i]:
            j += 1
        k = j - i
        a = atoms[i]
        t = atom_text(a, latex)
        if k > 1:
            if a[0] == "dot" and a[1] == a[2]:
                base = sym_latex(a[1]) if latex else a[1]
                t = f"{base}^{{{2 * k}}}" if latex else f"{base}^{2 * k}"
            else:
                t = f"{t}^{{{k}}}" if latex else f"{t}^{k}"
        parts.append(t)
        i = j
    return " ".join(parts)


# ---------------------------------------------------------------- quadrics
def quadric_argument_text(q: Quadric, latex: bool = False) -> str:
    """Text of ``E`` for ``exp(-E)``, grouping entries with a common denominator."""
    groups: dict[tuple, list] = {}
    for pair, r in q.entries:
        groups.setdefault(r.den, []).append((pair, r.num))
    pieces: list[tuple[int, str]] = []
    for den in sorted(groups, key=lambda d: (len(d) == 0, tuple((f.sort_key(), k) for f, k in d))):
        inner: list[tuple[int, str]] = []
        for pair, num in groups[den]:
            atom = atom_text(("dot",) + pair, latex) if pair else ""
            for sign, body in _poly_pieces(num, latex):
                if atom:
                    body = atom if body == "1" else f"{body} {atom}"
                inner.append((sign, body))
        if den:
            text = _join(inner)
            dtext = _factors_text(den, latex)
            if latex:
                pieces.append((1, f"\\frac{{{text}}}{{{dtext}}}"))
            else:
                if len(inner) > 1:
                    text = f"({text})"
                pieces.append((1, f"{text}/{_wrap_den(den, dtext)}"))
        else:
            pieces.extend(inner)
    return _join(pieces)


def quadric_text(q: Quadric, latex: bool = False) -> str:
    arg = quadric_argument_text(q, latex)
    if latex:
        return f"\\exp\\left(-\\left({arg}\\right)\\right)"
    return f"exp(-({arg}))"


# ---------------------------------------------------------------- expressions
def _term_text(coef: Rat, atoms, quad, latex: bool) -> tuple[int, str]:
    num = coef.num
    sign = 1
    if len(num.terms) == 1:
        (mono, c), = num.terms.items()
        if c < 0:
            sign, num = -1, -num
    extras = []
    if atoms:
        extras.append(_atoms_text(atoms, latex))
    if quad is not None:
        extras.append(quadric_text(quad, latex))
    ntext = poly_text(num, latex)
    if extras:
        if ntext == "1":
            body = " ".join(extras)
        elif len(num.terms) > 1:
            body = (f"\\left({ntext}\\right) " if latex else f"({ntext}) ") + " ".join(extras)
        else:
            body = ntext + " " + " ".join(extras)
    else:
        body = ntext
    if coef.den:
        dtext = _factors_text(coef.den, latex)
        if latex:
            body = f"\\frac{{{body}}}{{{dtext}}}"
        else:
            if len(num.terms) > 1 and not extras:
                body = f"({body})"
            body = f"{body}/{_wrap_den(coef.den, dtext)}"
    return sign, body


def render(expr: Expression, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(to_json(expr), sort_keys=False)
    latex = fmt == "latex"
    if fmt not in ("text", "latex"):
        raise ValueError(f"unknown format {fmt!r}")
    pieces = [_term_text(c, a, q, latex) for c, a, q in expr.terms()]
    return _join(pieces)


# ---------------------------------------------------------------- json
def _poly_json(p: Poly) -> list:
    return [[_coef_text(c), [[s, k] for s, k in m]] for m, c in p.sorted_terms()]


def _poly_from_json(data) -> Poly:
    terms = {}
    for coef, mono in data:
        m = tuple(sorted(((s, int(k)) for s, k in mono), key=lambda kv: natural_key(kv[0])))
        terms[m] = terms.get(m, 0) + Fraction(coef)
    return Poly(terms)


def rat_json(r: Rat) -> dict:
    return {"num": _poly_json(r.num), "den": [[_poly_json(f), k] for f, k in r.den]}


def rat_from_json(data) -> Rat:
    num = _poly_from_json(data["num"])
    den = {}
    for fdata, k in data.get("den", []):
        f = _poly_from_json(fdata)
        den[f] = den.get(f, 0) + int(k)
    return Rat(num, tuple(sorted(den.items(), key=_factor_sort_key)))


def to_json(expr: Expression) -> dict:
    terms = []
    for c, atoms, q in expr.terms():
        item = rat_json(c)
        item["tensors"] = [list(a) for a in atoms]
        item["exp"] = None if q is None else {"entries": [[list(p), rat_json(r)] for p, r in q.entries]}
        terms.append(item)
    return {"terms": terms}


def from_json(data) -> Expression:
    """Parse the JSON form produced by :func:`to_json` (string or decoded object)."""
    if isinstance(data, str):
        data = json.loads(data)
    out = []
    for t in data["terms"]:
        coef = rat_from_json(t)
        atoms = []
        for a in t.get("tensors", []):
            kind = a[0]
            if kind not in ("eta", "mom", "dot", "tok"):
                raise ValueError(f"unknown tensor kind {kind!r}")
            if kind == "eta":
                from .tensor import metric

                atoms.append(metric(a[1], a[2]))
            elif kind == "dot":
                from .tensor import dot

                atoms.append(dot(a[1], a[2]))
            else:
                atoms.append(tuple(a))
        quad = None
        if t.get("exp"):
            entries = {}
            for pair, r in t["exp"]["entries"]:
                entries[tuple(pair)] = rat_from_json(r)
            quad = Quadric(entries)
        out.append((coef, atoms, quad))
    return Expression(out)
