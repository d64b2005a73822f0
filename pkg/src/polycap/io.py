"""Polynomial file format and scalar parsing.

Files are JSON with a ``kind`` discriminator::

    {"kind": "sparse", "n": 3, "terms": [{"exp": [1,1,1], "coef": "6"}]}
    {"kind": "product", "matrix": [["1/2","1/2","0"], ...]}
    {"kind": "determinantal", "matrices": [[[...], ...], ...]}

Scalars are decimal or rational strings ("0.5", "1/3", "6") so exact inputs
survive the round trip; plain JSON numbers are accepted in float mode.
"""
from __future__ import annotations

import json
from fractions import Fraction
from numbers import Integral, Real

from .errors import InputError
from .polynomials import (
    DeterminantalPolynomial,
    ProductFormPolynomial,
    SparsePolynomial,
)

SCHEMA = "polycap/1"


def parse_scalar(value, mode: str):
    """Parse a JSON scalar (string/int/float) into a Fraction or float."""
    if isinstance(value, str):
        try:
            f = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse scalar {value!r}: {exc}") from None
        return f if mode == "exact" else float(f)
    if isinstance(value, bool):
        raise InputError(f"cannot parse scalar {value!r}")
    if isinstance(value, Integral):
        return Fraction(int(value)) if mode == "exact" else float(value)
    if isinstance(value, Real):
        if mode == "exact":
            raise InputError(
                f"float literal {value!r} in exact mode; quote it as a rational "
                "string (e.g. \"1/3\") to preserve exactness"
            )
        return float(value)
    raise InputError(f"cannot parse scalar of type {type(value).__name__}")


def scalar_to_string(value) -> str:
    """Canonical string form: Fractions as 'p/q' or 'k', floats via repr."""
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


def format_scalar(value):
    """JSON-report form: Fractions become strings, floats stay numbers."""
    if isinstance(value, (Fraction, int)):
        return str(value)
    return float(value)


def _require(obj: dict, field: str, where: str):
    if field not in obj:
        raise InputError(f"missing field {field!r} in {where}")
    return obj[field]


def polynomial_from_dict(obj, mode: str = "float"):
    if not isinstance(obj, dict):
        raise InputError("polynomial document must be a JSON object")
    schema = obj.get("schema")
    if schema is not None and schema != SCHEMA:
        raise InputError(f"unsupported schema {schema!r}; expected {SCHEMA!r}")
    kind = _require(obj, "kind", "polynomial document")
    if kind == "sparse":
        n = _require(obj, "n", "sparse polynomial")
        if not isinstance(n, int) or n < 1:
            raise InputError(f"field 'n' must be a positive integer, got {n!r}")
        raw_terms = _require(obj, "terms", "sparse polynomial")
        terms = {}
        for idx, t in enumerate(raw_terms):
            if not isinstance(t, dict):
                raise InputError(f"terms[{idx}] must be an object with 'exp' and 'coef'")
            exp = _require(t, "exp", f"terms[{idx}]")
            coef = _require(t, "coef", f"terms[{idx}]")
            try:
                e = tuple(int(k) for k in exp)
            except (TypeError, ValueError):
                raise InputError(f"terms[{idx}].exp must be a list of integers") from None
            terms[e] = parse_scalar(coef, mode)
        return SparsePolynomial(n, terms, mode=mode)
    if kind == "product":
        matrix = _require(obj, "matrix", "product polynomial")
        rows = [[parse_scalar(v, mode) for v in row] for row in matrix]
        return ProductFormPolynomial(rows, mode=mode)
    if kind == "determinantal":
        matrices = _require(obj, "matrices", "determinantal polynomial")
        mats = [[[parse_scalar(v, mode) for v in row] for row in m] for m in matrices]
        return DeterminantalPolynomial(mats, mode=mode)
    raise InputError(
        f"unknown kind {kind!r}; expected 'sparse', 'product', or 'determinantal'"
    )


def polynomial_to_dict(poly) -> dict:
    if isinstance(poly, SparsePolynomial):
        return {
            "kind": "sparse",
            "n": poly.n_vars,
            "terms": [
                {"exp": list(e), "coef": scalar_to_string(c)}
                for e, c in sorted(poly.terms.items())
            ],
        }
    if isinstance(poly, ProductFormPolynomial):
        return {
            "kind": "product",
            "matrix": [[scalar_to_string(v) for v in row] for row in poly.rows],
        }
    if isinstance(poly, DeterminantalPolynomial):
        return {
            "kind": "determinantal",
            "matrices": [
                [[scalar_to_string(v) for v in row] for row in m]
                for m in poly.matrices
            ],
        }
    raise InputError(f"cannot serialize {type(poly).__name__}")


def load_polynomial(path, mode: str = "float"):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(
            f"invalid JSON in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return polynomial_from_dict(obj, mode=mode)


def save_polynomial(path, poly):
    doc = {"schema": SCHEMA, **polynomial_to_dict(poly)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
