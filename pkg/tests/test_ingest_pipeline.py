import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infrcs.calibration import Link
from infrcs.ingest import (
    RunConfig,
    SweepDataset,
    config_from_dict,
    parse_config,
    parse_dataset,
    parse_sidecar,
    write_dataset,
    write_sidecar,
)
from infrcs.model import CirRecord, Frequency, Geometry, Kind, RcsTriple, ValidationError
from infrcs.pipeline import extract_rcs, fit_groups, system_factors
from infrcs.synth import generate_campaign


def line(freq, kind, taps, target=None, snapshot=0):
    obj = {"freq_ghz": freq, "kind": kind, "snapshot": snapshot}
    if target is not None:
        obj["target"] = target
    obj["taps_re"] = [t.real for t in taps]
    obj["taps_im"] = [t.imag for t in taps]
    return json.dumps(obj)


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n")
    return path


class TestParseDataset:
    def test_minimal(self, tmp_path):
        p = write_lines(
            tmp_path / "d.jsonl",
            [
                line(28, "reference", [1 + 0j, 0.5j], snapshot=0),
                line(28, "reference", [1 + 0j, 0.5j], snapshot=1),
                line(28, "target", [1 + 0j, 1 + 0.5j], "small_uav", 0),
                line(28, "target", [1 + 0j, 2 + 0.5j], "small_uav", 1),
            ],
        )
        ds = parse_dataset(p)
        assert ds.frequencies == {Frequency(28)}
        assert ds.targets == {"small_uav"}
        assert len(ds.group(Frequency(28), Kind.TARGET, "small_uav")) == 2

    def test_missing_reference_names_frequency(self, tmp_path):
        p = write_lines(
            tmp_path / "d.jsonl",
            [line(28, "reference", [1 + 0j]), line(28, "target", [2 + 0j], "x"), line(27, "target", [2 + 0j], "x")],
        )
        with pytest.raises(ValidationError, match="27 GHz"):
            parse_dataset(p)

    def test_tap_length_mismatch_has_line_number(self, tmp_path):
        bad = json.dumps({"freq_ghz": 28, "kind": "reference", "taps_re": [1, 2], "taps_im": [0]})
        p = write_lines(tmp_path / "d.jsonl", [line(28, "reference", [1 + 0j]), bad])
        with pytest.raises(ValidationError, match="line 2"):
            parse_dataset(p)

    def test_collects_every_error(self, tmp_path):
        p = write_lines(
            tmp_path / "d.jsonl",
            [
                "{not json",
                json.dumps({"freq_ghz": -1, "kind": "reference", "taps_re": [1], "taps_im": [0]}),
                json.dumps({"freq_ghz": 28, "kind": "target", "taps_re": [], "taps_im": []}),
            ],
        )
        with pytest.raises(ValidationError) as exc:
            parse_dataset(p)
        msgs = exc.value.violations
        assert any(m.startswith("line 1") for m in msgs)
        assert any(m.startswith("line 2") for m in msgs)
        assert sum(m.startswith("line 3") for m in msgs) == 2

    def test_duplicate_snapshot(self, tmp_path):
        p = write_lines(tmp_path / "d.jsonl", [line(28, "reference", [1 + 0j])] * 2)
        with pytest.raises(ValidationError, match="duplicate"):
            parse_dataset(p)

    def test_dataset_reports_all_violations(self):
        recs = [
            CirRecord(Frequency(25), Kind.TARGET, [1], target="a"),
            CirRecord(Frequency(26), Kind.TARGET, [1], target="a"),
            CirRecord(Frequency(28), Kind.REFERENCE, [1]),
            CirRecord(Frequency(28), Kind.REFERENCE, [1]),
        ]
        with pytest.raises(ValidationError) as exc:
            SweepDataset(tuple(recs))
        assert len(exc.value.violations) == 2
        assert "25 GHz, 26 GHz" in exc.value.violations[0]


complex_taps = st.lists(
    st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False), min_size=1, max_size=6
)


@st.composite
def datasets(draw):
    recs = []
    for f in draw(st.lists(st.sampled_from([25.0, 26.0, 27.5, 28.0]), min_size=1, max_size=3, unique=True)):
        for i in range(draw(st.integers(1, 2))):
            recs.append(CirRecord(Frequency(f), Kind.REFERENCE, draw(complex_taps), snapshot=i))
        for name in draw(st.lists(st.sampled_from(["agv", "small_uav"]), unique=True, max_size=2)):
            for i in range(draw(st.integers(1, 3))):
                recs.append(CirRecord(Frequency(f), Kind.TARGET, draw(complex_taps), target=name, snapshot=i))
    return SweepDataset(tuple(draw(st.permutations(recs))))


@settings(max_examples=40, deadline=None)
@given(datasets())
def test_dataset_round_trip(tmp_path_factory, ds):
    p = tmp_path_factory.mktemp("rt") / "d.jsonl"
    write_dataset(ds, p)
    assert parse_dataset(p) == ds


class TestConfig:
    def test_shorthand(self):
        cfg = config_from_dict({"d_m": 3.0, "baseline_m": 0.55})
        assert cfg.geometry == Geometry(3.0, 3.0, 0.55)
        assert cfg.geometry.theta_offset == pytest.approx(10, abs=1)

    def test_empty_defaults(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text("")
        assert parse_config(p) == RunConfig()
        p.write_text("{}")
        assert parse_config(p) == RunConfig()

    def test_negative_distance(self):
        with pytest.raises(ValidationError, match="d_m"):
            config_from_dict({"d_m": -1})

    def test_unknown_field(self):
        with pytest.raises(ValidationError, match="bogus"):
            config_from_dict({"bogus": 1})

    def test_sidecar_relative_path(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"calibration_sidecar": "cal.json", "frequencies_ghz": [28]}))
        cfg = parse_config(p)
        assert cfg.calibration_sidecar == tmp_path / "cal.json"
        assert cfg.frequencies == (Frequency(28),)


class TestSidecar:
    def test_round_trip(self, tmp_path):
        table = {Frequency(25): 1e-6, Frequency(28): 2.5e-7}
        write_sidecar(table, tmp_path / "s.json")
        assert parse_sidecar(tmp_path / "s.json") == table

    def test_mapping_form(self, tmp_path):
        (tmp_path / "s.json").write_text('{"28": 1e-6}')
        assert parse_sidecar(tmp_path / "s.json") == {Frequency(28): 1e-6}

    def test_bad_power(self, tmp_path):
        (tmp_path / "s.json").write_text('[{"freq_ghz": 28, "p_r": -1}]')
        with pytest.raises(ValidationError):
            parse_sidecar(tmp_path / "s.json")


LINK = Link(0.01, 100.0, 100.0, 0.25)


class TestPipeline:
    def test_hand_built_dataset(self):
        # K = P_r / (4 pi d^2) with P_r = 4 pi * 9 -> K = 1, so RCS equals differential power
        recs = (
            CirRecord(Frequency(28), Kind.REFERENCE, [1.0, 0.0]),
            CirRecord(Frequency(28), Kind.TARGET, [1.0, math.sqrt(0.5)], target="t", snapshot=0),
            CirRecord(Frequency(28), Kind.TARGET, [1.0, math.sqrt(2.0)], target="t", snapshot=1),
            CirRecord(Frequency(28), Kind.TARGET, [1.0, 0.0], target="t", snapshot=2),
        )
        sets = extract_rcs(SweepDataset(recs), RunConfig(), {Frequency(28): 4 * math.pi * 9})
        s = sets[("t", Frequency(28))]
        np.testing.assert_allclose(s.samples, [0.5, 2.0])
        assert s.discarded == 1
        fit = fit_groups(sets)[("t", Frequency(28))]
        assert fit.mu == pytest.approx(0.0, abs=1e-15)
        assert fit.sigma == pytest.approx(math.log(2))

    def test_needs_exactly_one_calibration_source(self):
        camp = generate_campaign({}, Geometry(), LINK, [Frequency(28)], 1, 0, calibration="records")
        system_factors(camp.dataset, RunConfig())
        with pytest.raises(ValidationError, match="both"):
            system_factors(camp.dataset, RunConfig(), {Frequency(28): 1.0})
        bare = generate_campaign({}, Geometry(), LINK, [Frequency(28)], 1, 0)
        with pytest.raises(ValidationError, match="no calibration"):
            system_factors(bare.dataset, RunConfig())

    def test_too_few_samples(self):
        recs = (
            CirRecord(Frequency(28), Kind.REFERENCE, [1.0]),
            CirRecord(Frequency(28), Kind.TARGET, [2.0], target="t"),
        )
        sets = extract_rcs(SweepDataset(recs), RunConfig(), {Frequency(28): 1.0})
        with pytest.raises(ValidationError, match="t @ 28 GHz"):
            fit_groups(sets)

    def test_frequency_filter(self):
        triple = RcsTriple(-13.57, b2_db=3.065)
        freqs = [Frequency(25), Frequency(28)]
        camp = generate_campaign({"u": triple}, Geometry(), LINK, freqs, 20, 3)
        cfg = RunConfig(frequencies=(Frequency(25),))
        assert set(extract_rcs(camp.dataset, cfg, camp.sidecar)) == {("u", Frequency(25))}
