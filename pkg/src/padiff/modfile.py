"""JSON on-disk format for differential modules.

A module file records the prime, the rank, the connection matrix and
optionally a dict of expected invariants used by the corpus checks.
Matrix entries come in three shapes: a polynomial string in t with
rational coefficients ("-1", "-t", "3/4*t^2"), a plain list of rational
strings giving the coefficients directly, or an object with explicit
"coefficients" carrying capped p-adic values and a tail flag for
entries that are only known through a finite window.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from padiff.diffmod import DifferentialModule
from padiff.linalg import SeriesMatrix
from padiff.padic import PadicNumber
from padiff.series import TruncatedSeries

FORMAT = "padiff-module-v1"


class ModfileError(ValueError):
    """A module file failed to parse or validate."""


_TOKEN = re.compile(r"\d+|[t^*/+-]")


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ModfileError("syntax error at %r" % text[pos])
        tokens.append(m.group(0))
        pos = m.end()
    return tokens


def parse_polynomial(text: str, p: int) -> TruncatedSeries:
    """Polynomial in t with rational coefficients, e.g. "3/4*t^2 - t".

    Terms are rational constants, monomials t or t^k, or products
    coefficient * t^k (the * may be omitted); they are joined by + or -.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ModfileError("empty entry")
    coeffs: dict[int, Fraction] = {}
    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else None

    first = True
    while i < len(tokens):
        sign = 1
        signed = False
        while peek() in ("+", "-"):
            if tokens[i] == "-":
                sign = -sign
            signed = True
            i += 1
        if not first and not signed:
            raise ModfileError("expected + or - before %r" % peek())
        tok = peek()
        if tok is None:
            raise ModfileError("dangling sign at end of entry")
        coeff = Fraction(1)
        have_coeff = False
        if tok.isdigit():
            i += 1
            num = int(tok)
            den = 1
            if peek() == "/":
                i += 1
                if peek() is None or not peek().isdigit():
                    raise ModfileError("expected an integer after '/'")
                den = int(tokens[i])
                i += 1
                if den == 0:
                    raise ModfileError("zero denominator")
            coeff = Fraction(num, den)
            have_coeff = True
            if peek() == "*":
                i += 1
                if peek() != "t":
                    raise ModfileError("expected t after '*'")
        power = 0
        if peek() == "t":
            i += 1
            power = 1
            if peek() == "^":
                i += 1
                if peek() is None or not peek().isdigit():
                    raise ModfileError("expected an exponent after '^'")
                power = int(tokens[i])
                i += 1
        elif not have_coeff:
            raise ModfileError("syntax error at %r" % tok)
        coeffs[power] = coeffs.get(power, Fraction(0)) + sign * coeff
        first = False
    top = max(coeffs)
    values = [coeffs.get(k, Fraction(0)) for k in range(top + 1)]
    return TruncatedSeries.from_rationals(p, values)


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _coeff_to_json(c: PadicNumber):
    if c.is_exact:
        return str(c.exact)
    return c.to_json()


def _coeff_from_json(value, p: int) -> PadicNumber:
    if isinstance(value, str):
        q = Fraction(value)
        return PadicNumber.from_rational(q.numerator, q.denominator, p)
    return PadicNumber.from_json(value, p)


def _entry_to_json(s: TruncatedSeries):
    if s.tail_exact and all(c.is_exact for c in s.coeffs):
        return [str(c.exact) for c in s.coeffs]
    return {
        "coefficients": [_coeff_to_json(c) for c in s.coeffs],
        "tail_exact": s.tail_exact,
    }


def _entry_from_json(value, p: int) -> TruncatedSeries:
    if isinstance(value, str):
        return parse_polynomial(value, p)
    if isinstance(value, list):
        coeffs = [_coeff_from_json(v, p) for v in value]
        return TruncatedSeries(p, coeffs, True)
    coeffs = [_coeff_from_json(v, p) for v in value["coefficients"]]
    return TruncatedSeries(p, coeffs, bool(value.get("tail_exact", False)))


def module_to_json(name: str, module: DifferentialModule,
                   expected: dict | None = None) -> dict:
    doc = {
        "format": FORMAT,
        "name": name,
        "prime": module.p,
        "rank": module.rank,
        "matrix": [[_entry_to_json(c) for c in row]
                   for row in module.matrix.entries],
    }
    if expected is not None:
        doc["expected"] = expected
    return doc


def module_from_json(doc: dict) -> tuple[str, DifferentialModule, dict]:
    if doc.get("format") != FORMAT:
        raise ModfileError("not a module file (format %r)" % doc.get("format"))
    p = int(doc["prime"])
    if not _is_prime(p):
        raise ModfileError("prime field is %d, which is not prime" % p)
    rank = int(doc["rank"])
    rows = doc["matrix"]
    if len(rows) != rank or any(len(r) != rank for r in rows):
        raise ModfileError("matrix shape disagrees with the declared rank")
    entries = []
    for i, row in enumerate(rows):
        out = []
        for j, cell in enumerate(row):
            try:
                out.append(_entry_from_json(cell, p))
            except ModfileError as exc:
                raise ModfileError("entry (%d, %d): %s" % (i, j, exc)) from None
        entries.append(out)
    module = DifferentialModule(SeriesMatrix(p, entries), label=doc.get("name", ""))
    return doc.get("name", ""), module, dict(doc.get("expected", {}))


@dataclass(frozen=True)
class ModuleDescription:
    name: str
    module: DifferentialModule
    expected: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    path: str | None = None


_ORDER_KEYS = ("solve", "growth", "iterates")


def parse_module(path) -> ModuleDescription:
    """Load and validate a module description file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ModfileError("%s: %s" % (path, exc)) from None
    try:
        name, module, expected = module_from_json(doc)
    except ModfileError as exc:
        raise ModfileError("%s: %s" % (path, exc)) from None
    orders = dict(doc.get("orders", {}))
    for key in orders:
        if key not in _ORDER_KEYS:
            raise ModfileError("%s: unknown order key %r" % (path, key))
        orders[key] = int(orders[key])
    return ModuleDescription(name, module, expected, orders, str(path))


def dump_module(path, name: str, module: DifferentialModule,
                expected: dict | None = None) -> None:
    with open(path, "w") as fh:
        json.dump(module_to_json(name, module, expected), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_module(path) -> tuple[str, DifferentialModule, dict]:
    with open(path) as fh:
        return module_from_json(json.load(fh))
