"""Flat-file catalog of series identities, conjectures and certificates.

The catalog is a line-oriented text database: one record per block of
``key: value`` lines, blocks separated by blank lines.  Three record kinds
exist, each validated on load:

* ``series_identity`` — a concrete series (kernel, base, weight, optional
  denominator factors) together with its claimed closed form ``rhs``, an
  optional left-hand scale factor, and verification hints;
* ``telescoping`` — a partial-sum certificate checked by exact induction;
* ``derivative`` — a rational-derivative certificate with pinned endpoints.

Every record carries a ``status`` (PROVED / CONJECTURAL / CITED /
KNOWN_FALSE) and a ``source`` locator.  Records are immutable after load;
``serialize_catalog`` reproduces the canonical file byte-for-byte.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional, Union

from .closedform import ClosedForm, parse_closed_form
from .kernels import kernel_by_tag
from .seriesmodel import Position, SeriesDef, parse_base, parse_den_factors, parse_weight
from .telescope import DerivativeCert, TelescopingCert, parse_derivative, parse_telescoping

__all__ = [
    "IdentityRecord",
    "Catalog",
    "CatalogError",
    "load_catalog",
    "loads_catalog",
    "serialize_catalog",
    "resolve_catalog_path",
    "CATALOG_ENV",
    "KINDS",
    "STATUSES",
]

CATALOG_ENV = "BSERIES_CATALOG"

KINDS = ("series_identity", "telescoping", "derivative")
STATUSES = ("PROVED", "CONJECTURAL", "CITED", "KNOWN_FALSE")

# Canonical key order used by the serializer; parsing accepts any order.
_KEY_ORDER = (
    "id",
    "kind",
    "kernel",
    "position",
    "base",
    "weight",
    "den",
    "kstart",
    "closed_form",
    "f_rational",
    "arctan_coeff",
    "target",
    "endpoint",
    "rhs",
    "lhs_scale",
    "status",
    "source",
    "source_note",
    "min_digits",
    "budget_terms",
)
_KEY_RANK = {k: i for i, k in enumerate(_KEY_ORDER)}

_COMMON_REQUIRED = frozenset({"id", "kind", "status", "source"})
_COMMON_OPTIONAL = frozenset({"source_note"})
_ALLOWED_BY_KIND = {
    "series_identity": (
        frozenset({"kernel", "position", "base", "weight", "rhs"}),
        frozenset({"den", "kstart", "lhs_scale", "min_digits", "budget_terms"}),
    ),
    "telescoping": (
        frozenset({"kernel", "position", "base", "weight", "den", "closed_form"}),
        frozenset({"kstart"}),
    ),
    "derivative": (
        frozenset({"f_rational", "arctan_coeff", "target"}),
        frozenset({"endpoint"}),
    ),
}


class CatalogError(ValueError):
    """Malformed catalog file: carries the record id / line when known."""


@dataclass(frozen=True)
class IdentityRecord:
    """One catalog entry, with raw fields kept for exact re-serialization."""

    id: str
    kind: str
    status: str
    source: str
    fields: dict[str, str]
    source_note: Optional[str] = None
    series: Optional[SeriesDef] = None
    rhs: Optional[ClosedForm] = None
    lhs_scale: Optional[ClosedForm] = None
    min_digits: Optional[int] = None
    budget_terms: Optional[int] = None
    cert: Union[TelescopingCert, DerivativeCert, None] = None

    def serialize(self) -> str:
        keys = sorted(self.fields, key=_KEY_RANK.__getitem__)
        return "\n".join(f"{k}: {self.fields[k]}" for k in keys) + "\n"

    def __repr__(self):
        return f"IdentityRecord(id={self.id!r}, kind={self.kind!r}, status={self.status!r})"


class Catalog:
    """Immutable ordered collection of records with id lookup and tallies."""

    __slots__ = ("records", "_by_id")

    def __init__(self, records):
        recs = tuple(records)
        by_id: dict[str, IdentityRecord] = {}
        for r in recs:
            if r.id in by_id:
                raise CatalogError(f"duplicate record id {r.id!r}")
            by_id[r.id] = r
        object.__setattr__(self, "records", recs)
        object.__setattr__(self, "_by_id", by_id)

    def __setattr__(self, *_):
        raise AttributeError("Catalog is immutable")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[IdentityRecord]:
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    def __contains__(self, rid) -> bool:
        return rid in self._by_id

    def lookup(self, rid: str) -> IdentityRecord:
        try:
            return self._by_id[rid]
        except KeyError:
            raise CatalogError(f"no record with id {rid!r}") from None

    @property
    def tallies(self) -> dict[str, int]:
        out = {s: 0 for s in STATUSES}
        for r in self.records:
            out[r.status] += 1
        return out

    def by_kind(self, kind: str) -> tuple[IdentityRecord, ...]:
        return tuple(r for r in self.records if r.kind == kind)

    def by_status(self, *statuses: str) -> tuple[IdentityRecord, ...]:
        return tuple(r for r in self.records if r.status in statuses)

    def serialize(self) -> str:
        return serialize_catalog(self.records)


def serialize_catalog(records) -> str:
    """Canonical text for a sequence of records (blank-line separated)."""
    return "\n".join(r.serialize() for r in records)


def _positive_int(fields: dict[str, str], key: str, rid: str, line: int) -> Optional[int]:
    if key not in fields:
        return None
    raw = fields[key]
    try:
        n = int(raw)
    except ValueError:
        raise CatalogError(f"record {rid!r} (line {line}): {key} must be an integer, got {raw!r}")
    if n < 1:
        raise CatalogError(f"record {rid!r} (line {line}): {key} must be >= 1, got {n}")
    return n


def _build_record(fields: dict[str, str], line: int) -> IdentityRecord:
    rid = fields.get("id")
    if not rid:
        raise CatalogError(f"record starting at line {line}: missing id")

    def err(msg: str) -> CatalogError:
        return CatalogError(f"record {rid!r} (line {line}): {msg}")

    kind = fields.get("kind")
    if kind not in KINDS:
        raise err(f"kind must be one of {KINDS}, got {kind!r}")
    status = fields.get("status")
    if status not in STATUSES:
        raise err(f"status must be one of {STATUSES}, got {status!r}")
    source = fields.get("source")
    if not source:
        raise err("missing source")

    required, optional = _ALLOWED_BY_KIND[kind]
    allowed = required | optional | _COMMON_REQUIRED | _COMMON_OPTIONAL
    unknown = set(fields) - allowed
    if unknown:
        raise err(f"keys {sorted(unknown)} not allowed for kind {kind}")
    missing = required - set(fields)
    if missing:
        raise err(f"missing required keys {sorted(missing)}")

    series = rhs = lhs_scale = cert = None
    min_digits = _positive_int(fields, "min_digits", rid, line)
    budget_terms = _positive_int(fields, "budget_terms", rid, line)
    kstart = 0
    if "kstart" in fields:
        try:
            kstart = int(fields["kstart"])
        except ValueError:
            raise err(f"kstart must be an integer, got {fields['kstart']!r}")
        if kstart < 0:
            raise err(f"kstart must be >= 0, got {kstart}")

    try:
        if kind == "series_identity":
            root, exp = parse_base(fields["base"])
            series = SeriesDef(
                base_root=root,
                base_exp=exp,
                kernel=kernel_by_tag(fields["kernel"]),
                kernel_pos=Position(fields["position"]),
                weight=parse_weight(fields["weight"]),
                den_factors=parse_den_factors(fields.get("den", "1")),
                k_start=kstart,
            )
            rhs = parse_closed_form(fields["rhs"])
            if "lhs_scale" in fields:
                lhs_scale = parse_closed_form(fields["lhs_scale"])
        elif kind == "telescoping":
            cert = parse_telescoping(
                kernel=fields["kernel"],
                position=fields["position"],
                base=fields["base"],
                weight=fields["weight"],
                den=fields["den"],
                closed_form=fields["closed_form"],
                k_start=kstart,
            )
        else:
            cert = parse_derivative(
                f_rational=fields["f_rational"],
                arctan_coeff=fields["arctan_coeff"],
                target=fields["target"],
                endpoint=fields.get("endpoint"),
            )
    except CatalogError:
        raise
    except (ValueError, KeyError, ZeroDivisionError) as e:
        raise err(str(e)) from e

    if status == "KNOWN_FALSE" and not rid.startswith("aldawoud"):
        raise err("status KNOWN_FALSE is reserved for the aldawoud discrepancy record")

    return IdentityRecord(
        id=rid,
        kind=kind,
        status=status,
        source=source,
        fields=dict(fields),
        source_note=fields.get("source_note"),
        series=series,
        rhs=rhs,
        lhs_scale=lhs_scale,
        min_digits=min_digits,
        budget_terms=budget_terms,
        cert=cert,
    )


def loads_catalog(text: str) -> Catalog:
    """Parse catalog text into records; errors carry record id and line."""
    records: list[IdentityRecord] = []
    seen: dict[str, int] = {}
    fields: dict[str, str] = {}
    block_line = 0

    def flush():
        if not fields:
            return
        rec = _build_record(fields, block_line)
        if rec.id in seen:
            raise CatalogError(
                f"duplicate record id {rec.id!r} (lines {seen[rec.id]} and {block_line})"
            )
        seen[rec.id] = block_line
        records.append(rec)
        fields.clear()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            flush()
            continue
        if not fields:
            block_line = lineno
        key, sep, value = line.partition(": ")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise CatalogError(f"line {lineno}: expected 'key: value', got {line!r}")
        if key not in _KEY_RANK:
            raise CatalogError(f"line {lineno}: unknown key {key!r}")
        if key in fields:
            raise CatalogError(f"line {lineno}: duplicate key {key!r} in one record")
        fields[key] = value
    flush()
    return Catalog(records)


def load_catalog(path: Union[str, Path]) -> Catalog:
    """Load and validate a catalog file (UTF-8)."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as e:
        raise CatalogError(f"cannot read catalog {p}: {e}") from e
    return loads_catalog(text)


def resolve_catalog_path(explicit: Optional[str] = None) -> Path:
    """Flag value > BSERIES_CATALOG environment variable > packaged default."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(CATALOG_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("bseries").joinpath("data/catalog.txt")))
