"""Grid ingestion: case-file parsing, transformer classification, native format.

Two input paths produce a :class:`~gridcodes.graphs.GridGraph`:

* a MATPOWER-style case file (the ``mpc.bus`` / ``mpc.branch`` matrices only;
  every other section is ignored), classified by a :class:`TransformerRule`;
* the native grid format, a strict JSON document with ``schema_version``,
  ``meta``, ``buses``, ``lines`` and ``transformers`` sections.

The native format is canonical: writing a graph twice yields identical bytes,
and branch order in the document is preserved (it fixes sensor-site numbering).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import ParseError, SchemaError
from .graphs import Bus, GridGraph, Line, Transformer

SCHEMA_VERSION = 1

_META_KEYS = {"name", "source", "notes"}


@dataclass(frozen=True)
class BusRow:
    bus_id: int
    base_kv: float


@dataclass(frozen=True)
class BranchRow:
    from_bus: int
    to_bus: int
    tap: float
    status: int


@dataclass(frozen=True)
class CaseFile:
    name: str
    bus_table: tuple[BusRow, ...]
    branch_table: tuple[BranchRow, ...]


@dataclass(frozen=True)
class TransformerRule:
    """How to decide which branches are transformers.

    * ``tap-ratio``: a branch with tap ratio other than 0 or 1 is a transformer.
    * ``voltage-mismatch``: endpoints with different base kV mark a transformer.
    * ``explicit-list``: 0-based row indices into the case branch table.
    """

    mode: str = "tap-ratio"
    explicit_list: frozenset[int] = field(default_factory=frozenset)

    MODES = ("tap-ratio", "voltage-mismatch", "explicit-list")

    def __post_init__(self):
        if self.mode not in self.MODES:
            raise SchemaError(f"unknown transformer rule mode {self.mode!r}")
        if self.mode == "explicit-list" and not self.explicit_list:
            raise SchemaError("explicit-list rule requires a non-empty index list")


# -- MATPOWER-subset parsing --------------------------------------------------

_SECTION_RE = re.compile(r"mpc\.(\w+)\s*=\s*\[")
_NAME_RE = re.compile(r"function\s+mpc\s*=\s*(\w+)")


def _strip_comment(line: str) -> str:
    pos = line.find("%")
    return line if pos < 0 else line[:pos]


def parse_case(text: str) -> CaseFile:
    """Parse the documented MATPOWER subset into a :class:`CaseFile`.

    Only ``mpc.bus`` (columns 1 and 10: id, base kV) and ``mpc.branch``
    (columns 1, 2, 9, 11: from, to, tap, status) are read.  ``%`` starts a
    comment; matrix rows are separated by newlines or semicolons.
    """
    name = ""
    matrices: dict[str, list[tuple[list[float], int]]] = {}
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if current is None:
            m = _NAME_RE.search(line)
            if m:
                name = m.group(1)
            m = _SECTION_RE.search(line)
            if m is None:
                continue
            current = m.group(1)
            matrices.setdefault(current, [])
            line = line[m.end():]
        # inside a matrix: rows end at ';' and the matrix ends at ']'
        while line.strip():
            end = line.find("]")
            chunk, line = (line, "") if end < 0 else (line[:end], "")
            for row_text in chunk.split(";"):
                if not row_text.strip():
                    continue
                fields = []
                for tok in row_text.split():
                    try:
                        fields.append(float(tok))
                    except ValueError:
                        col = raw.find(tok) + 1
                        raise ParseError(
                            f"expected a number in mpc.{current} row, got {tok!r}",
                            line=lineno, column=col if col > 0 else None) from None
                if fields:
                    matrices[current].append((fields, lineno))
            if end >= 0:
                current = None
                break
    if current is not None:
        raise ParseError(f"unterminated matrix mpc.{current}: expected ']'",
                         line=len(text.splitlines()))

    if "bus" not in matrices:
        raise ParseError("missing mpc.bus section: expected 'mpc.bus = ['")
    if "branch" not in matrices:
        raise ParseError("missing mpc.branch section: expected 'mpc.branch = ['")

    bus_rows = []
    for fields, lineno in matrices["bus"]:
        if len(fields) < 10:
            raise ParseError(
                f"bus row needs at least 10 columns, got {len(fields)}", line=lineno)
        bus_rows.append(BusRow(bus_id=int(fields[0]), base_kv=float(fields[9])))
    branch_rows = []
    for fields, lineno in matrices["branch"]:
        if len(fields) < 11:
            raise ParseError(
                f"branch row needs at least 11 columns, got {len(fields)}", line=lineno)
        branch_rows.append(BranchRow(
            from_bus=int(fields[0]), to_bus=int(fields[1]),
            tap=float(fields[8]), status=int(fields[10])))

    case = CaseFile(name=name, bus_table=tuple(bus_rows), branch_table=tuple(branch_rows))
    _validate_case(case)
    return case


def _validate_case(case: CaseFile) -> None:
    if not case.bus_table:
        raise SchemaError("case has an empty bus table")
    ids = [b.bus_id for b in case.bus_table]
    if len(set(ids)) != len(ids):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise SchemaError(f"duplicate bus ids in case: {dup}")
    known = set(ids)
    for i, br in enumerate(case.branch_table):
        for b in (br.from_bus, br.to_bus):
            if b not in known:
                raise SchemaError(f"branch row {i} references undeclared bus {b}")


# -- grid construction ---------------------------------------------------------

def build_grid(case: CaseFile, rule: TransformerRule | None = None,
               name: str | None = None) -> GridGraph:
    """Classify branches and assemble the construction graph.

    In-service branches are ordered canonically by (from-bus, to-bus, source
    row index) and numbered 0..B-1; transformers are named T1.. in that order.
    Out-of-service branches contribute neither edges nor sensor sites.
    """
    rule = rule or TransformerRule()
    if rule.mode == "explicit-list":
        nrows = len(case.branch_table)
        for idx in sorted(rule.explicit_list):
            if not 0 <= idx < nrows:
                raise SchemaError(f"explicit transformer index {idx} out of range 0..{nrows - 1}")
            if case.branch_table[idx].status == 0:
                raise SchemaError(f"explicit transformer index {idx} is out of service")

    base_kv = {b.bus_id: b.base_kv for b in case.bus_table}
    in_service = [(row, idx) for idx, row in enumerate(case.branch_table) if row.status != 0]
    in_service.sort(key=lambda ri: (ri[0].from_bus, ri[0].to_bus, ri[1]))

    def is_transformer(row: BranchRow, idx: int) -> bool:
        if rule.mode == "tap-ratio":
            return row.tap not in (0.0, 1.0)
        if rule.mode == "voltage-mismatch":
            return base_kv[row.from_bus] != base_kv[row.to_bus]
        return idx in rule.explicit_list

    buses = tuple(Bus(id=b.bus_id, name=f"Bus {b.bus_id}", base_kv=b.base_kv)
                  for b in sorted(case.bus_table, key=lambda b: b.bus_id))
    lines: list[Line] = []
    transformers: list[Transformer] = []
    for branch_id, (row, idx) in enumerate(in_service):
        if is_transformer(row, idx):
            transformers.append(Transformer(
                id=branch_id, name=f"T{len(transformers) + 1}",
                from_bus=row.from_bus, to_bus=row.to_bus))
        else:
            lines.append(Line(id=branch_id, from_bus=row.from_bus, to_bus=row.to_bus))
    return GridGraph(buses, lines, transformers, name=name or case.name)


# -- native grid format --------------------------------------------------------

def write_grid(g: GridGraph) -> str:
    """Serialize to the canonical native form (byte-stable for a given graph)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "meta": {"name": g.name},
        "buses": [{"id": b.id, "name": b.name, "base_kv": b.base_kv} for b in g.buses],
        "lines": [{"id": ln.id, "from": ln.from_bus, "to": ln.to_bus} for ln in g.lines],
        "transformers": [{"id": t.id, "name": t.name, "from": t.from_bus, "to": t.to_bus}
                         for t in g.transformers],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_grid(text: str) -> GridGraph:
    """Parse the native grid format; inverse of :func:`write_grid`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise ParseError("grid document must be a JSON object")
    required = {"schema_version", "meta", "buses", "lines", "transformers"}
    missing = required - doc.keys()
    if missing:
        raise ParseError(f"missing section(s): {', '.join(sorted(missing))}")
    unknown = doc.keys() - required
    if unknown:
        raise ParseError(f"unknown section(s): {', '.join(sorted(unknown))}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ParseError(f"unsupported schema_version {doc['schema_version']!r}, "
                         f"expected {SCHEMA_VERSION}")
    meta = doc["meta"]
    if not isinstance(meta, dict) or not meta.keys() <= _META_KEYS:
        raise ParseError(f"meta section allows only keys {sorted(_META_KEYS)}")

    buses = [_record(r, i, "buses", {"id": int, "name": str, "base_kv": (int, float)},
                     lambda f: Bus(id=f["id"], name=f["name"], base_kv=float(f["base_kv"])))
             for i, r in enumerate(_array(doc, "buses"))]
    lines = [_record(r, i, "lines", {"id": int, "from": int, "to": int},
                     lambda f: Line(id=f["id"], from_bus=f["from"], to_bus=f["to"]))
             for i, r in enumerate(_array(doc, "lines"))]
    transformers = [_record(r, i, "transformers",
                            {"id": int, "name": str, "from": int, "to": int},
                            lambda f: Transformer(id=f["id"], name=f["name"],
                                                  from_bus=f["from"], to_bus=f["to"]))
                    for i, r in enumerate(_array(doc, "transformers"))]
    return GridGraph(buses, lines, transformers, name=str(meta.get("name", "")))


def _array(doc: dict, key: str) -> list:
    val = doc[key]
    if not isinstance(val, list):
        raise ParseError(f"section {key!r} must be an array")
    return val


def _record(raw, index: int, section: str, schema: dict, build):
    if not isinstance(raw, dict):
        raise ParseError(f"{section}[{index}] must be an object")
    unknown = raw.keys() - schema.keys()
    if unknown:
        raise ParseError(f"{section}[{index}] has unknown field(s): {', '.join(sorted(unknown))}")
    missing = schema.keys() - raw.keys()
    if missing:
        raise ParseError(f"{section}[{index}] missing field(s): {', '.join(sorted(missing))}")
    for key, typ in schema.items():
        if not isinstance(raw[key], typ) or isinstance(raw[key], bool):
            raise ParseError(f"{section}[{index}].{key} has wrong type")
    return build(raw)
