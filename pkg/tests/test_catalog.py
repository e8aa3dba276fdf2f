import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from grsuper.catalog import (
    CatalogEntry,
    CatalogError,
    RModel,
    builtin_catalog,
    builtin_catalog_text,
    characteristic_size,
    load_catalog,
    load_catalog_file,
    mass_number,
    parse_r_model,
    serialize_catalog,
)
from grsuper.physics import nucleus_model, zero_point_fluctuation

GOOD = '{"id": "x", "label": "X", "f_m_hz": 1e6, "mass_kg": 1e-12, "q_factor": 1e6, "material": "Si"}'


class TestBuiltin:
    def test_ten_entries_in_order(self):
        ids = [e.id for e in builtin_catalog()]
        assert len(ids) == 10 == len(set(ids))
        labels = [e.label for e in builtin_catalog()]
        assert [lab[:3] for lab in labels] == [f"({c})" for c in "abcdefghij"]

    def test_canonical_bytes(self):
        text = builtin_catalog_text()
        assert serialize_catalog(load_catalog(text)) == text

    @pytest.mark.parametrize(
        "id_, f_m, mass, Q",
        [
            ("sinx-membrane-large", 2e5, 5e-10, 1e8),
            ("soft-clamped-membrane", 1e6, 2e-12, 1e9),
            ("teufel-drum", 1e7, 5e-14, 7e5),
            ("bulk-acoustic", 1e7, 5e-6, 1e9),
        ],
    )
    def test_documented_parameters(self, id_, f_m, mass, Q):
        e = {x.id: x for x in builtin_catalog()}[id_]
        assert (e.f_m, e.mass, e.Q) == (f_m, mass, Q)
        assert e.T_bath == 0.01

    def test_every_entry_has_physical_inputs(self):
        for e in builtin_catalog():
            assert e.f_m > 0 and e.mass > 0 and e.Q > 0
            assert e.A in (27, 28)


class TestLoad:
    def test_minimal_record_gets_default_bath(self):
        (e,) = load_catalog(GOOD)
        assert e.T_bath == 0.01 and e.notes == ""

    def test_comments_and_blank_lines(self):
        assert len(load_catalog("# header\n\n" + GOOD + "\n   \n")) == 1

    def test_numeric_strings_accepted(self):
        (e,) = load_catalog(GOOD.replace("1e6,", '"1e6",', 1))
        assert e.f_m == 1e6

    def test_empty_document_is_empty_catalog(self):
        assert load_catalog("") == []
        assert load_catalog("# only a comment\n") == []

    def test_file(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text(GOOD + "\n", encoding="utf-8")
        assert load_catalog_file(p)[0].id == "x"

    @pytest.mark.parametrize(
        "patch, field",
        [
            (lambda d: d.pop("mass_kg"), "mass_kg"),
            (lambda d: d.update(mass_kg=-1.0), "mass_kg"),
            (lambda d: d.update(q_factor=0), "q_factor"),
            (lambda d: d.update(f_m_hz="fast"), "f_m_hz"),
            (lambda d: d.update(t_bath_k=True), "t_bath_k"),
            (lambda d: d.update(material="Unobtainium"), "material"),
            (lambda d: d.update(colour="red"), "colour"),
            (lambda d: d.update(id=""), "id"),
        ],
    )
    def test_field_level_errors(self, patch, field):
        d = json.loads(GOOD)
        patch(d)
        with pytest.raises(CatalogError) as info:
            load_catalog("# c\n" + json.dumps(d))
        assert (2, field) in [(ln, f) for ln, f, _ in info.value.problems]

    def test_infinite_value_rejected(self):
        with pytest.raises(CatalogError):
            load_catalog(GOOD.replace("1e6,", "Infinity,", 1))

    def test_duplicate_ids(self):
        with pytest.raises(CatalogError, match="duplicate id"):
            load_catalog(GOOD + "\n" + GOOD)

    def test_malformed_json(self):
        with pytest.raises(CatalogError, match="line 1: malformed JSON"):
            load_catalog("{not json")

    def test_all_problems_reported(self):
        with pytest.raises(CatalogError) as info:
            load_catalog("[1]\n{bad\n")
        assert [p[0] for p in info.value.problems] == [1, 2]


entries = st.builds(
    CatalogEntry,
    id=st.text("abcdefghijklmnopqrstuvwxyz-0123456789", min_size=1, max_size=12),
    label=st.text(max_size=30),
    f_m=st.floats(1e2, 1e11),
    mass=st.floats(1e-20, 1e-2),
    Q=st.floats(1, 1e12),
    material=st.sampled_from(["Si", "Al", "SiN", "other:12"]),
    T_bath=st.floats(1e-4, 400),
    notes=st.text(max_size=40),
)


@given(st.lists(entries, max_size=5, unique_by=lambda e: e.id))
def test_round_trip(items):
    text = serialize_catalog(items)
    back = load_catalog(text)
    assert back == items
    assert serialize_catalog(back) == text


class TestMaterials:
    @pytest.mark.parametrize("material, A", [("Si", 28), ("Al", 27), ("SiN", 28), ("other:93", 93)])
    def test_mass_number(self, material, A):
        assert mass_number(material) == A

    @pytest.mark.parametrize("bad", ["Fe", "other:x", "other:0"])
    def test_rejected(self, bad):
        with pytest.raises(ValueError):
            mass_number(bad)


class TestRModel:
    def test_parse(self):
        assert parse_r_model("nucleus") == RModel()
        assert parse_r_model("zpf") == RModel("zpf")
        assert parse_r_model("fixed:5e-11") == RModel("fixed", 5e-11)
        assert str(RModel("fixed", 5e-11)) == "fixed:5e-11"

    @pytest.mark.parametrize("bad", ["atom", "fixed:", "fixed:-1", "fixed:abc"])
    def test_parse_errors(self, bad):
        with pytest.raises(ValueError):
            parse_r_model(bad)

    def test_characteristic_size(self):
        e = CatalogEntry("x", "x", 1e6, 2e-12, 1e9, "SiN")
        assert characteristic_size(e, RModel()) == nucleus_model(28).a
        assert characteristic_size(e, RModel("zpf")) == zero_point_fluctuation(e.mode)
        assert characteristic_size(e, RModel("fixed", 5e-11)) == 5e-11
        assert math.isclose(characteristic_size(e, RModel()), 2.73e-15, rel_tol=5e-3)
