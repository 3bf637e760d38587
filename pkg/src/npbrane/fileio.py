"""JSON files for tensors and Dorfman sections.

Tensor: ``{"dim": n, "degree": p, "variance": "vector"|"form",
"terms": [{"index": [i1, ..], "coeff": "<expression>"}]}`` with 1-based
strictly increasing indices.  Section: ``{"order": p, "vec": <tensor>,
"form": <tensor>}``.  Errors carry the line and column of the offending
JSON value.
"""
from __future__ import annotations

import json
from pathlib import Path

from .dorfman import Section
from .errors import ParseError
from .exterior import FORM, VECTOR, AltTensor
from .scalarfield import Chart, parse_scalar


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Locator:
    """Maps the k-th occurrence of a JSON key to a line/column."""

    def __init__(self, text: str):
        self.text = text
        self.seen: dict[str, int] = {}

    def next(self, key: str) -> tuple[int, int]:
        start = self.seen.get(key, 0)
        pos = self.text.find(f'"{key}"', start)
        if pos < 0:
            return 1, 1
        self.seen[key] = pos + 1
        return _position(self.text, pos)

    def first(self, key: str) -> tuple[int, int]:
        pos = self.text.find(f'"{key}"')
        return _position(self.text, max(pos, 0))


def _read_json(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None


def _tensor_from_obj(obj, loc: _Locator, chart: Chart | None) -> AltTensor:
    if not isinstance(obj, dict):
        raise ParseError("tensor must be a JSON object", 1, 1)
    for key in ("dim", "degree", "variance", "terms"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}", 1, 1)
    n, p, var = obj["dim"], obj["degree"], obj["variance"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError("dim must be a positive integer", *loc.first("dim"))
    if not isinstance(p, int) or isinstance(p, bool) or not 0 <= p <= n:
        raise ParseError(f"degree must be an integer in 0..{n}", *loc.first("degree"))
    if var not in (VECTOR, FORM):
        raise ParseError(f"variance must be {VECTOR!r} or {FORM!r}", *loc.first("variance"))
    if chart is None:
        chart = Chart(n)
    elif chart.dim != n:
        raise ParseError(f"dimension {n} does not match the chart ({chart.dim})", *loc.first("dim"))
    if not isinstance(obj["terms"], list):
        raise ParseError("terms must be a list", *loc.first("terms"))
    coeffs = {}
    for term in obj["terms"]:
        where_i = loc.next("index")
        where_c = loc.next("coeff")
        if not isinstance(term, dict) or "index" not in term or "coeff" not in term:
            raise ParseError("each term needs 'index' and 'coeff'", *where_i)
        idx = term["index"]
        if (not isinstance(idx, list) or len(idx) != p
                or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx)):
            raise ParseError(f"index must be a list of {p} integers", *where_i)
        if any(i < 1 or i > n for i in idx):
            raise ParseError(f"index {idx} outside 1..{n}", *where_i)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ParseError(f"index {idx} is not strictly increasing", *where_i)
        key = tuple(idx)
        if key in coeffs:
            raise ParseError(f"duplicate index {idx}", *where_i)
        c = term["coeff"]
        if isinstance(c, int) and not isinstance(c, bool):
            c = str(c)
        if not isinstance(c, str):
            raise ParseError("coeff must be an expression string", *where_c)
        try:
            coeffs[key] = parse_scalar(chart, c)
        except ParseError as exc:
            raise ParseError(f"bad coefficient {c!r}: {exc.args[0]}", *where_c) from None
        except ZeroDivisionError:
            raise ParseError(f"bad coefficient {c!r}: division by zero", *where_c) from None
    return AltTensor(chart, p, var, coeffs)


def parse_tensor(text: str, chart: Chart | None = None) -> AltTensor:
    return _tensor_from_obj(_read_json(text), _Locator(text), chart)


def load_tensor(path, chart: Chart | None = None) -> AltTensor:
    return parse_tensor(Path(path).read_text(), chart)


def tensor_to_obj(T: AltTensor) -> dict:
    return {"dim": T.chart.dim, "degree": T.degree, "variance": T.variance,
            "terms": [{"index": list(k), "coeff": str(T.coeffs[k])} for k in sorted(T.coeffs)]}


def _format_tensor(obj: dict, indent: str = "") -> str:
    head = ", ".join(f'"{k}": {json.dumps(obj[k])}' for k in ("dim", "degree", "variance"))
    terms = [f'{indent}    {json.dumps(t)}' for t in obj["terms"]]
    if not terms:
        return f'{{{head}, "terms": []}}'
    return f'{{{head},\n{indent}  "terms": [\n' + ",\n".join(terms) + f'\n{indent}  ]}}'


def dump_tensor(T: AltTensor) -> str:
    """One term per line, sorted by index."""
    if T.chart.params:
        raise ValueError("cannot write a tensor with parameter-dependent coefficients")
    return _format_tensor(tensor_to_obj(T)) + "\n"


def parse_section(text: str, chart: Chart | None = None) -> Section:
    obj = _read_json(text)
    loc = _Locator(text)
    if not isinstance(obj, dict) or not {"order", "vec", "form"} <= set(obj):
        raise ParseError("section needs 'order', 'vec' and 'form'", 1, 1)
    p = obj["order"]
    if not isinstance(p, int) or isinstance(p, bool) or p < 2:
        raise ParseError("order must be an integer >= 2", *loc.first("order"))
    vec = _tensor_from_obj(obj["vec"], loc, chart)
    form = _tensor_from_obj(obj["form"], loc, vec.chart)
    try:
        return Section(vec, form, p)
    except ValueError as exc:
        raise ParseError(str(exc), *loc.first("order")) from None


def load_section(path, chart: Chart | None = None) -> Section:
    return parse_section(Path(path).read_text(), chart)


def dump_section(e: Section) -> str:
    vec = _format_tensor(tensor_to_obj(e.vec), "  ")
    form = _format_tensor(tensor_to_obj(e.form), "  ")
    return f'{{"order": {e.order},\n  "vec": {vec},\n  "form": {form}}}\n'
