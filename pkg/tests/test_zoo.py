import numpy as np
import pytest

from eigenmp import zoo


def test_catalog_names_and_lookup():
    names = zoo.names()
    assert "neg_u_xx" in names and "grushin" in names and "pucci_max_degenerate" in names
    with pytest.raises(KeyError):
        zoo.get("nonexistent_operator")


def test_entries_carry_hypothesis_flags_and_facts():
    for name in zoo.names():
        e = zoo.get(name)
        assert set(e.hypotheses) == {"H1", "H2", "H3", "H4", "H5", "H6"}
        for f in e.known_facts:
            assert f.provenance in ("PAPER", "TRIVIAL", "DERIVED")


def test_alpha_at_most_one_whenever_h5_is_claimed():
    for name in zoo.names():
        e = zoo.get(name)
        if e.hypotheses["H5"]:
            assert 0 < e.spec.alpha <= 1.0


def test_sqrt_examples_fail_h4():
    assert not zoo.get("neg_sqrt_x_drift").hypotheses["H4"]
    assert not zoo.get("neg_x_u_xx").hypotheses["H4"]


def test_pucci_positivity_claim_is_recorded_unverified():
    e = zoo.get("pucci_max_degenerate")
    facts = [f for f in e.known_facts if f.quantity == "mu1"]
    assert facts and not facts[0].verified


def test_catalog_round_trips_through_text(tmp_path):
    path = tmp_path / "catalog.txt"
    text = zoo.write_catalog(path)
    assert path.read_text() == text
    records = zoo.parse_catalog(text)
    assert set(records) == set(zoo.names())
    for name in zoo.names():
        e = zoo.get(name)
        rec = records[name]
        assert int(rec["dim"]) == e.spec.dim
        assert float(rec["alpha"]) == pytest.approx(e.spec.alpha)
        assert rec["kind"] == e.spec.kind
        assert len(rec["facts"]) == len(e.known_facts)
        assert ("unverified" in " ".join(rec["facts"])) == any(
            not f.verified for f in e.known_facts
        )


def test_grushin_diffusion_matrix_degenerates_on_the_axis():
    e = zoo.get("grushin")
    a, b, c = e.spec.linear_part.matrices(np.array([[0.0, 0.5], [0.5, 0.5]]))
    assert a[0, 1] == 0.0 and a[1, 1] == pytest.approx(0.25)
    assert a[0, 0] == a[1, 0] == 1.0
