"""Color labels, per-target signatures, and alarm-pattern decoding.

A verified sensor selection becomes a :class:`Placement`: each selected site
gets a unique atomic label (A, B, ... then AA, AB, ... in site order), and
every target's signature is the set of labels of the selected sites that
observe it.  Signatures are pairwise distinct by construction, so an exact
alarm pattern identifies at most one target.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import NotACodeError, NotFoundError, ParseError
from .graphs import MonitorInstance
from .solver import verify


def label_for(index: int) -> str:
    """Spreadsheet-style label: 0 -> A, 25 -> Z, 26 -> AA, ..."""
    if index < 0:
        raise ValueError("label index must be non-negative")
    out = []
    index += 1
    while index:
        index, rem = divmod(index - 1, 26)
        out.append(chr(ord("A") + rem))
    return "".join(reversed(out))


@dataclass(frozen=True)
class Placement:
    """An accepted sensor selection with labels and target signatures."""

    sites: tuple[int, ...]                       # selected candidate ids, ascending
    labels: dict[int, str]                       # site id -> atomic label
    signatures: dict[int, frozenset[str]]        # target id -> composite color
    target_names: dict[int, str]
    k: int
    metric: str
    site_info: dict[int, tuple[int, int]] = field(default_factory=dict)
    instance: MonitorInstance | None = None

    def signature(self, target: int) -> frozenset[str]:
        try:
            return self.signatures[target]
        except KeyError:
            raise NotFoundError(f"unknown target id {target!r}") from None

    @property
    def label_set(self) -> frozenset[str]:
        return frozenset(self.labels.values())

    def target_name(self, target: int) -> str:
        return self.target_names.get(target, str(target))


@dataclass(frozen=True)
class AlarmPattern:
    raised: frozenset[str]

    @classmethod
    def from_labels(cls, labels) -> "AlarmPattern":
        return cls(raised=frozenset(str(x) for x in labels))


@dataclass(frozen=True)
class DecodeResult:
    status: str                    # "identified" | "no-match"
    target: int | None = None
    target_name: str = ""
    diagnostics: tuple[str, ...] = ()

    @property
    def identified(self) -> bool:
        return self.status == "identified"

    def __str__(self) -> str:
        if self.identified:
            return f"Identified({self.target_name})"
        return "NoMatch" + (f" ({'; '.join(self.diagnostics)})" if self.diagnostics else "")


def assign_codes(m: MonitorInstance, selected) -> Placement:
    """Label a verified selection and materialize the signature table.

    Raises :class:`NotACodeError` when the selection fails verification.
    """
    report = verify(m, selected)
    if not report.passed:
        raise NotACodeError(report)
    sites = tuple(sorted(int(c) for c in selected))
    labels = {site: label_for(i) for i, site in enumerate(sites)}
    signatures = {
        t: frozenset(labels[c] for c in report.traces[t])
        for t in m.targets
    }
    return Placement(
        sites=sites, labels=labels, signatures=signatures,
        target_names={t: m.target_name(t) for t in m.targets},
        k=m.k, metric=m.metric,
        site_info={s: m.candidate_info[s] for s in sites if s in m.candidate_info},
        instance=m,
    )


def decode(p: Placement, alarm: AlarmPattern) -> DecodeResult:
    """Map an alarm pattern back to the failing target.

    Exact signature match identifies the target (unique by construction).
    Anything else -- including strict subsets or supersets of a signature,
    which would indicate multiple simultaneous failures or a sensor fault --
    reports no match, with the nearest signatures listed for the operator.
    """
    unknown = alarm.raised - p.label_set
    if unknown:
        raise NotFoundError(f"unknown alarm label(s): {sorted(unknown)}")
    for t in sorted(p.signatures):
        if p.signatures[t] == alarm.raised:
            return DecodeResult(status="identified", target=t, target_name=p.target_name(t))
    nearest = sorted(
        p.signatures,
        key=lambda t: (len(p.signatures[t] ^ alarm.raised), t))[:3]
    diags = [
        f"{p.target_name(t)}={_fmt_sig(p.signatures[t])} "
        f"(distance {len(p.signatures[t] ^ alarm.raised)})"
        for t in nearest
    ]
    return DecodeResult(status="no-match", diagnostics=tuple(diags))


def _fmt_sig(sig: frozenset[str]) -> str:
    return "".join(sorted(sig, key=lambda s: (len(s), s))) or "-"


def signature_table(p: Placement) -> str:
    """Human-readable target -> signature table, deterministic row order."""
    rows = [(p.target_name(t), _fmt_sig(p.signatures[t])) for t in sorted(p.signatures)]
    width = max([6] + [len(r[0]) for r in rows])
    out = [f"{'target':<{width}}  signature", f"{'-' * width}  ---------"]
    out.extend(f"{name:<{width}}  {sig}" for name, sig in rows)
    return "\n".join(out)


def signature_csv(p: Placement) -> str:
    """CSV rendering: one row per target (target, signature)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["target", "signature"])
    for t in sorted(p.signatures):
        w.writerow([p.target_name(t), _fmt_sig(p.signatures[t])])
    return buf.getvalue()


# -- placement serialization -----------------------------------------------------

PLACEMENT_SCHEMA_VERSION = 1


def write_placement(p: Placement) -> str:
    doc = {
        "schema_version": PLACEMENT_SCHEMA_VERSION,
        "k": p.k,
        "metric": p.metric,
        "sites": [
            {"id": s, "label": p.labels[s],
             **dict(zip(("branch", "host"), p.site_info.get(s, ())))}
            for s in p.sites
        ],
        "signatures": {
            str(t): {"name": p.target_name(t), "labels": sorted(p.signatures[t])}
            for t in sorted(p.signatures)
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def read_placement(text: str) -> Placement:
    """Load a placement written by :func:`write_placement`.

    The loaded value carries no instance reference; decoding and rendering
    work, re-verification requires the original monitor instance.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    try:
        if doc["schema_version"] != PLACEMENT_SCHEMA_VERSION:
            raise ParseError(f"unsupported schema_version {doc['schema_version']!r}")
        sites = tuple(int(s["id"]) for s in doc["sites"])
        labels = {int(s["id"]): str(s["label"]) for s in doc["sites"]}
        site_info = {int(s["id"]): (int(s["branch"]), int(s["host"]))
                     for s in doc["sites"] if "branch" in s}
        signatures = {int(t): frozenset(map(str, v["labels"]))
                      for t, v in doc["signatures"].items()}
        target_names = {int(t): str(v["name"]) for t, v in doc["signatures"].items()}
        return Placement(
            sites=sites, labels=labels, signatures=signatures,
            target_names=target_names, k=int(doc["k"]), metric=str(doc["metric"]),
            site_info=site_info, instance=None)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed placement document: {exc}") from None
