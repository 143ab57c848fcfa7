"""Catalog loading, validation, round-trip, path resolution, and label map."""

import re
from pathlib import Path

import pytest

from bseries.catalog import (
    CATALOG_ENV,
    Catalog,
    CatalogError,
    IdentityRecord,
    load_catalog,
    loads_catalog,
    resolve_catalog_path,
    serialize_catalog,
)
from bseries.evaluator import Status, verify_identity
from bseries.telescope import DerivativeCert, TelescopingCert

REPO_ROOT = Path(__file__).resolve().parent.parent
SOURCE_DOC = REPO_ROOT / "paper.md"
SHIPPED = resolve_catalog_path()
MAP_FILE = SHIPPED.parent / "paper_map.txt"

MINIMAL = """\
id: t1
kind: series_identity
kernel: central^3
position: denominator
base: 16
weight: 3*k - 1
den: k^3
kstart: 1
rhs: 1/2*pi^2
status: CITED
source: somewhere
"""


@pytest.fixture(scope="module")
def shipped():
    return load_catalog(SHIPPED)


# ---------------------------------------------------------------------------
# shipped catalog content
# ---------------------------------------------------------------------------


def test_shipped_catalog_is_large(shipped):
    assert len(shipped) >= 60
    assert len(shipped) == 99


def test_shipped_tallies(shipped):
    assert shipped.tallies == {
        "PROVED": 15,
        "CONJECTURAL": 60,
        "CITED": 23,
        "KNOWN_FALSE": 1,
    }


def test_required_status_examples(shipped):
    assert shipped.lookup("thm1.1-pi").status == "PROVED"
    assert shipped.lookup("conj5.1-375").status == "CONJECTURAL"
    assert shipped.lookup("aldawoud-t31-r10").status == "KNOWN_FALSE"


def test_only_aldawoud_is_known_false(shipped):
    false = shipped.by_status("KNOWN_FALSE")
    assert [r.id for r in false] == ["aldawoud-t31-r10"]


def test_ids_unique(shipped):
    ids = [r.id for r in shipped]
    assert len(ids) == len(set(ids))


def test_every_series_record_parses_fully(shipped):
    for rec in shipped.by_kind("series_identity"):
        assert rec.series is not None, rec.id
        assert rec.rhs is not None, rec.id


def test_certificates_parse(shipped):
    tel = shipped.by_kind("telescoping")
    der = shipped.by_kind("derivative")
    assert len(tel) == 4 and len(der) == 1
    assert all(isinstance(r.cert, TelescopingCert) for r in tel)
    assert all(isinstance(r.cert, DerivativeCert) for r in der)


def test_verification_hints_parsed(shipped):
    slow = shipped.lookup("conj5.1-slow")
    assert slow.min_digits == 20
    assert slow.budget_terms == 20000


def test_lhs_scale_on_known_false_record(shipped):
    rec = shipped.lookup("aldawoud-t31-r10")
    assert rec.lhs_scale is not None
    # the scale is a positive constant (pi times a real surd)
    assert rec.lhs_scale.eval_ball(15).mid > 0


def test_round_trip_byte_identity(shipped):
    assert shipped.serialize() == SHIPPED.read_text(encoding="utf-8")


def test_membership_and_indexing(shipped):
    assert "thm1.1-pi" in shipped
    assert "no-such-record" not in shipped
    assert shipped[0].id == "sec1-z"


def test_lookup_missing_id_raises(shipped):
    with pytest.raises(CatalogError, match="no record with id 'nope'"):
        shipped.lookup("nope")


# ---------------------------------------------------------------------------
# parser errors
# ---------------------------------------------------------------------------


def test_empty_text_gives_empty_catalog():
    cat = loads_catalog("")
    assert len(cat) == 0
    assert cat.serialize() == ""
    assert serialize_catalog([]) == ""


def test_blank_lines_only():
    assert len(loads_catalog("\n\n\n")) == 0


def test_minimal_record_round_trip():
    cat = loads_catalog(MINIMAL)
    assert cat.serialize() == MINIMAL
    rec = cat.lookup("t1")
    assert rec.kind == "series_identity"
    assert rec.series.k_start == 1


def test_key_order_normalized_on_serialize():
    shuffled = (
        "status: CITED\nid: t1\nsource: somewhere\nrhs: 1/2*pi^2\n"
        "kind: series_identity\nweight: 3*k - 1\nden: k^3\nkstart: 1\n"
        "base: 16\nkernel: central^3\nposition: denominator\n"
    )
    assert loads_catalog(shuffled).serialize() == MINIMAL


def test_malformed_line_reports_line_number():
    bad = MINIMAL.replace("weight: 3*k - 1", "weight 3*k - 1")
    with pytest.raises(CatalogError, match=r"line 6: expected 'key: value'"):
        loads_catalog(bad)


def test_unknown_key_rejected():
    with pytest.raises(CatalogError, match="unknown key 'wight'"):
        loads_catalog(MINIMAL.replace("weight:", "wight:"))


def test_duplicate_key_in_record_rejected():
    with pytest.raises(CatalogError, match="duplicate key 'base'"):
        loads_catalog(MINIMAL + "base: 17\n")


def test_duplicate_id_reports_both_lines():
    text = MINIMAL + "\n" + MINIMAL
    with pytest.raises(CatalogError, match=r"duplicate record id 't1' \(lines 1 and 13\)"):
        loads_catalog(text)


def test_parse_error_carries_record_id_and_line():
    bad = MINIMAL.replace("weight: 3*k - 1", "weight: 3*k -")
    with pytest.raises(CatalogError, match=r"record 't1' \(line 1\)"):
        loads_catalog(bad)


def test_bad_kind_rejected():
    with pytest.raises(CatalogError, match="kind must be one of"):
        loads_catalog(MINIMAL.replace("kind: series_identity", "kind: mystery"))


def test_bad_status_rejected():
    with pytest.raises(CatalogError, match="status must be one of"):
        loads_catalog(MINIMAL.replace("status: CITED", "status: TRUE"))


def test_missing_required_key_rejected():
    bad = MINIMAL.replace("rhs: 1/2*pi^2\n", "")
    with pytest.raises(CatalogError, match=r"missing required keys \['rhs'\]"):
        loads_catalog(bad)


def test_known_false_reserved():
    bad = MINIMAL.replace("status: CITED", "status: KNOWN_FALSE")
    with pytest.raises(CatalogError, match="KNOWN_FALSE is reserved"):
        loads_catalog(bad)


def test_negative_kstart_rejected():
    with pytest.raises(CatalogError, match="kstart must be >= 0"):
        loads_catalog(MINIMAL.replace("kstart: 1", "kstart: -1"))


def test_bad_min_digits_rejected():
    with pytest.raises(CatalogError, match="min_digits must be >= 1"):
        loads_catalog(MINIMAL + "min_digits: 0\n")


def test_series_keys_not_allowed_on_derivative():
    bad = (
        "id: d1\nkind: derivative\nbase: 16\nf_rational: t\narctan_coeff: 1\n"
        "target: 1\nstatus: PROVED\nsource: s\n"
    )
    with pytest.raises(CatalogError, match=r"keys \['base'\] not allowed"):
        loads_catalog(bad)


# ---------------------------------------------------------------------------
# path resolution
# ---------------------------------------------------------------------------


def test_resolve_explicit_beats_env(tmp_path, monkeypatch):
    flag = tmp_path / "flag.txt"
    env = tmp_path / "env.txt"
    monkeypatch.setenv(CATALOG_ENV, str(env))
    assert resolve_catalog_path(str(flag)) == flag


def test_resolve_env_beats_packaged(tmp_path, monkeypatch):
    env = tmp_path / "env.txt"
    monkeypatch.setenv(CATALOG_ENV, str(env))
    assert resolve_catalog_path() == env


def test_resolve_packaged_default(monkeypatch):
    monkeypatch.delenv(CATALOG_ENV, raising=False)
    p = resolve_catalog_path()
    assert p.name == "catalog.txt"
    assert p.exists()


def test_load_catalog_missing_file(tmp_path):
    with pytest.raises(CatalogError, match="cannot read catalog"):
        load_catalog(tmp_path / "absent.txt")


def test_load_env_override_round_trips(tmp_path, monkeypatch):
    alt = tmp_path / "alt.txt"
    alt.write_text(MINIMAL, encoding="utf-8")
    monkeypatch.setenv(CATALOG_ENV, str(alt))
    cat = load_catalog(resolve_catalog_path())
    assert len(cat) == 1 and "t1" in cat


# ---------------------------------------------------------------------------
# label map over the source document
# ---------------------------------------------------------------------------


@pytest.mark.skipif(not SOURCE_DOC.exists(), reason="source document not present")
def test_label_map_covers_source_document(shipped):
    labels = re.findall(r"\\label\{([^}]*)\}", SOURCE_DOC.read_text(encoding="utf-8"))
    assert labels, "source document has labels"
    mapped = {}
    for line in MAP_FILE.read_text(encoding="utf-8").splitlines():
        parts = line.split("\t")
        assert len(parts) in (2, 3), line
        mapped[parts[0]] = parts[1]
    assert set(mapped) == set(labels)
    for label, ids in mapped.items():
        if ids == "-":
            continue
        for rid in ids.split(","):
            assert rid in shipped, f"{label} -> {rid}"


@pytest.mark.skipif(not SOURCE_DOC.exists(), reason="source document not present")
def test_label_map_in_document_order():
    labels = re.findall(r"\\label\{([^}]*)\}", SOURCE_DOC.read_text(encoding="utf-8"))
    keys = [ln.split("\t")[0] for ln in MAP_FILE.read_text(encoding="utf-8").splitlines()]
    assert keys == labels


# ---------------------------------------------------------------------------
# spot numeric checks straight off the shipped records
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("rid", ["thm1.2-42k+5", "conj3.7-equiv", "sec2-4500"])
def test_spot_verify_shipped_records(shipped, rid):
    rec = shipped.lookup(rid)
    rep = verify_identity(rec.series, rec.rhs, digits=15, mode="heuristic",
                          budget_terms=20000, lhs_scale=rec.lhs_scale)
    assert rep.status is Status.PASS, rep.note


def test_spot_known_false_fails(shipped):
    rec = shipped.lookup("aldawoud-t31-r10")
    rep = verify_identity(rec.series, rec.rhs, digits=12, mode="heuristic",
                          budget_terms=20000, lhs_scale=rec.lhs_scale)
    assert rep.status is Status.FAIL
