"""Ingestion-layer tests: config, catalog fetch/parse, loaders, snapshots."""

import csv
import dataclasses
import json
from datetime import date, datetime, timezone

import pytest
import requests

from tokenlab import (
    CatalogError,
    CredentialError,
    PayloadError,
    Region,
    RunConfig,
    SchemaError,
    ValidationError,
    fetch_catalog,
    load_factors,
    load_milestones,
    load_shares,
    load_snapshot,
    load_training,
    parse_catalog_payload,
    persist_snapshot,
)
from tokenlab.ingest import file_fingerprint, normalize_per_token_price

MILESTONE_HEADER = [
    "model_id", "vendor", "observed_date", "input_price", "output_price",
    "quality_score", "reasoning", "open_weight", "region",
]


def write_csv(path, header, rows):
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def model_entry(id="openai/gpt-x", prompt="0.000002", completion="0.00001", **extra):
    return {"id": id, "pricing": {"prompt": prompt, "completion": completion}, **extra}


class TestRunConfig:
    def test_round_trip(self):
        config = RunConfig(bootstrap_b=250, blend_weights=(0.3, 0.7))
        assert RunConfig.from_dict(config.to_dict()) == config

    def test_from_dict_accepts_lists(self):
        config = RunConfig.from_dict({"tier_thresholds": [1.0, 4.0]})
        assert config.tier_thresholds == (1.0, 4.0)

    def test_unknown_key(self):
        with pytest.raises(SchemaError, match="bootstrap_n"):
            RunConfig.from_dict({"bootstrap_n": 100})

    @pytest.mark.parametrize(
        "field,value",
        [
            ("winsor_lower", 0.0),
            ("winsor_lower", 50.0),
            ("winsor_upper", 50.0),
            ("winsor_upper", 100.0),
            ("chow_min_segment", 0),
            ("bootstrap_b", -5),
            ("retries", 0),
            ("tier_thresholds", (5.0, 1.0)),
            ("blend_weights", (-0.2, 1.2)),
            ("blend_weights", (0.0, 0.0)),
        ],
    )
    def test_invariants(self, field, value):
        with pytest.raises(ValidationError):
            RunConfig(**{field: value})

    def test_hash_is_stable_and_sensitive(self):
        a = RunConfig()
        b = RunConfig()
        assert a.config_hash() == b.config_hash()
        assert len(a.config_hash()) == 64
        changed = dataclasses.replace(a, bootstrap_seed=1)
        assert changed.config_hash() != a.config_hash()

    def test_from_file(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"bootstrap_b": 50}), encoding="utf-8")
        assert RunConfig.from_file(path).bootstrap_b == 50
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(SchemaError, match="not valid JSON"):
            RunConfig.from_file(path)


class TestNormalizePerTokenPrice:
    def test_decimal_exactness(self):
        # float arithmetic would give 0.15000000000000002 here
        assert normalize_per_token_price("0.00000015", "p") == 0.15

    def test_numeric_input(self):
        assert normalize_per_token_price(0.000002, "p") == 2.0

    def test_error_names_field(self):
        with pytest.raises(PayloadError, match=r"data\[3\]\.pricing\.prompt"):
            normalize_per_token_price("free", "data[3].pricing.prompt")


class TestParseCatalogPayload:
    def test_happy_path(self):
        fetched = datetime(2025, 6, 1, 12, 0, tzinfo=timezone.utc)
        payload = {
            "data": [
                model_entry(quality_score=80, context_length=128000, reasoning=True),
                model_entry(id="standalone-model", prompt="0.00000015",
                            completion="0.0000006", region="CN"),
            ]
        }
        snapshot = parse_catalog_payload(payload, source="test", fetched_at=fetched)
        assert snapshot.source == "test"
        first, second = snapshot.records
        assert first.vendor == "openai"
        assert first.observed_date == date(2025, 6, 1)
        assert first.input_price == 2.0
        assert first.quality_score == 80.0
        assert first.reasoning is True
        assert second.vendor == "unknown"
        assert second.input_price == 0.15
        assert second.region is Region.CN

    @pytest.mark.parametrize(
        "payload,fragment",
        [
            ({}, "data"),
            ({"data": {"id": "x"}}, "must be a list"),
            ({"data": [{"pricing": {}}]}, r"data\[0\]\.id"),
            ({"data": [model_entry(), {"id": "a/b"}]}, r"data\[1\]\.pricing"),
            ({"data": [{"id": "a/b", "pricing": {"prompt": "0.01"}}]}, "completion"),
            ({"data": [model_entry(region="MARS")]}, r"data\[0\]\.region"),
        ],
    )
    def test_malformed_payloads(self, payload, fragment):
        with pytest.raises(PayloadError, match=fragment):
            parse_catalog_payload(payload, source="test")

    def test_duplicate_models_rejected(self):
        payload = {"data": [model_entry(), model_entry()]}
        with pytest.raises(PayloadError, match="invalid record"):
            parse_catalog_payload(payload, source="test")


class StubResponse:
    def __init__(self, status_code, payload=None, json_error=False):
        self.status_code = status_code
        self._payload = payload
        self._json_error = json_error

    def json(self):
        if self._json_error:
            raise ValueError("not json")
        return self._payload


class StubSession:
    """Plays back scripted responses (or raises scripted exceptions)."""

    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = []

    def get(self, url, headers=None, timeout=None):
        self.calls.append((url, dict(headers or {})))
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


@pytest.fixture
def no_sleep(monkeypatch):
    naps = []
    monkeypatch.setattr("time.sleep", naps.append)
    return naps


OK_PAYLOAD = {"data": [model_entry()]}


class TestFetchCatalogHttp:
    def test_success_with_credential(self):
        session = StubSession([StubResponse(200, OK_PAYLOAD)])
        snapshot = fetch_catalog(
            "https://example.test/api/v1/", credential="sekrit", session=session
        )
        url, headers = session.calls[0]
        assert url == "https://example.test/api/v1/models"
        assert headers["Authorization"] == "Bearer sekrit"
        assert snapshot.source == url
        assert len(snapshot.records) == 1

    def test_no_credential_no_header(self):
        session = StubSession([StubResponse(200, OK_PAYLOAD)])
        fetch_catalog("https://example.test/api/v1", session=session)
        _, headers = session.calls[0]
        assert "Authorization" not in headers

    def test_credential_rejection_is_immediate(self, no_sleep):
        session = StubSession([StubResponse(401)])
        with pytest.raises(CredentialError, match="401"):
            fetch_catalog("https://example.test/v1", session=session, retries=3)
        assert len(session.calls) == 1
        assert no_sleep == []

    def test_server_errors_retry_then_succeed(self, no_sleep):
        session = StubSession(
            [StubResponse(500), StubResponse(503), StubResponse(200, OK_PAYLOAD)]
        )
        snapshot = fetch_catalog(
            "https://example.test/v1", session=session, retries=3, backoff=0.5
        )
        assert len(snapshot.records) == 1
        assert len(session.calls) == 3
        assert no_sleep == [0.5, 1.0]

    def test_gives_up_after_budget(self, no_sleep):
        session = StubSession([StubResponse(500)] * 4)
        with pytest.raises(CatalogError, match="giving up .* after 4 attempts"):
            fetch_catalog("https://example.test/v1", session=session, retries=3)
        assert len(session.calls) == 4

    def test_connection_errors_retry(self, no_sleep):
        session = StubSession(
            [requests.ConnectionError("down"), StubResponse(200, OK_PAYLOAD)]
        )
        snapshot = fetch_catalog("https://example.test/v1", session=session)
        assert len(snapshot.records) == 1

    def test_client_error_fails_fast(self, no_sleep):
        session = StubSession([StubResponse(404)])
        with pytest.raises(CatalogError, match="404"):
            fetch_catalog("https://example.test/v1", session=session)
        assert len(session.calls) == 1

    def test_non_json_body(self):
        session = StubSession([StubResponse(200, json_error=True)])
        with pytest.raises(PayloadError, match="non-JSON"):
            fetch_catalog("https://example.test/v1", session=session)


class TestFetchCatalogFixture:
    def test_reads_fixture(self, tmp_path):
        path = tmp_path / "payload.json"
        path.write_text(json.dumps(OK_PAYLOAD), encoding="utf-8")
        snapshot = fetch_catalog("ignored", fixture_path=path)
        assert snapshot.source == f"fixture:{path}"
        assert len(snapshot.records) == 1

    def test_missing_fixture(self, tmp_path):
        with pytest.raises(CatalogError, match="does not exist"):
            fetch_catalog("ignored", fixture_path=tmp_path / "absent.json")

    def test_corrupt_fixture(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("[{", encoding="utf-8")
        with pytest.raises(PayloadError, match="not valid JSON"):
            fetch_catalog("ignored", fixture_path=path)

    def test_bundled_catalog(self, catalog_records):
        assert len(catalog_records) > 100
        assert all(r.input_price > 0 for r in catalog_records)


class TestSnapshotPersistence:
    def test_round_trip(self, tmp_path):
        original = parse_catalog_payload(
            {"data": [model_entry(quality_score=70)]},
            source="test",
            fetched_at=datetime(2025, 3, 1, tzinfo=timezone.utc),
        )
        path = tmp_path / "snap.json"
        persist_snapshot(original, path)
        loaded = load_snapshot(path)
        assert loaded.records == original.records
        assert loaded.fetched_at == original.fetched_at
        assert loaded.source == "test"

    def test_version_gate(self, tmp_path):
        path = tmp_path / "snap.json"
        path.write_text(
            json.dumps({"schema_version": 2, "fetched_at": "2025-01-01T00:00:00",
                        "source": "s", "records": []}),
            encoding="utf-8",
        )
        with pytest.raises(SchemaError, match="schema version 2"):
            load_snapshot(path)

    def test_corrupt_snapshot(self, tmp_path):
        path = tmp_path / "snap.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(SchemaError):
            load_snapshot(path)


GOOD_ROW = ["m1", "openai", "2024-03-01", "2.5", "10.0", "75", "0", "0", "US_EU"]


class TestLoadMilestones:
    def test_sorts_by_date(self, tmp_path):
        later = ["m2", "meta", "2024-06-01", "1.0", "4.0", "", "0", "1", "US_EU"]
        path = write_csv(tmp_path / "m.csv", MILESTONE_HEADER, [later, GOOD_ROW])
        records = load_milestones(path)
        assert [r.model_id for r in records] == ["m1", "m2"]
        assert records[1].quality_score is None
        assert records[1].open_weight is True

    def test_missing_column(self, tmp_path):
        header = [c for c in MILESTONE_HEADER if c != "output_price"]
        path = write_csv(tmp_path / "m.csv", header, [GOOD_ROW[:-1]])
        with pytest.raises(SchemaError, match="output_price"):
            load_milestones(path)

    @pytest.mark.parametrize(
        "column,bad",
        [
            ("observed_date", "03/01/2024"),
            ("input_price", "two"),
            ("reasoning", "yes"),
            ("region", "MOON"),
        ],
    )
    def test_bad_cell_names_file_and_line(self, tmp_path, column, bad):
        row = list(GOOD_ROW)
        row[MILESTONE_HEADER.index(column)] = bad
        path = write_csv(tmp_path / "m.csv", MILESTONE_HEADER, [GOOD_ROW, row])
        with pytest.raises(ValidationError) as excinfo:
            load_milestones(path)
        assert f"{path}:3:" in str(excinfo.value)

    def test_bad_tier_hint(self, tmp_path):
        header = MILESTONE_HEADER + ["tier_hint"]
        path = write_csv(tmp_path / "m.csv", header, [GOOD_ROW + ["luxury"]])
        with pytest.raises(ValidationError, match=":2:"):
            load_milestones(path)

    def test_duplicates_rejected(self, tmp_path):
        path = write_csv(tmp_path / "m.csv", MILESTONE_HEADER, [GOOD_ROW, GOOD_ROW])
        with pytest.raises(ValidationError, match="invalid record"):
            load_milestones(path)

    def test_bundled_panel(self, milestones):
        dates = [r.observed_date for r in milestones]
        assert dates == sorted(dates)
        assert len(milestones) >= 60


TRAINING_HEADER = [
    "model_id", "vendor", "region", "release_date",
    "training_cost_usd", "training_compute_flop", "parameter_count",
]


class TestLoadTraining:
    def test_sorted_and_parsed(self, tmp_path):
        rows = [
            ["t2", "v", "US_EU", "2024-01-01", "5400000", "3.3e24", "7e10"],
            ["t1", "v", "CN", "2023-01-01", "1000000", "1e24", "1e10"],
        ]
        path = write_csv(tmp_path / "t.csv", TRAINING_HEADER, rows)
        records = load_training(path)
        assert [r.model_id for r in records] == ["t1", "t2"]
        assert records[1].training_compute == 3.3e24

    def test_positivity(self, tmp_path):
        rows = [["t", "v", "US_EU", "2024-01-01", "0", "1e24", "1e10"]]
        path = write_csv(tmp_path / "t.csv", TRAINING_HEADER, rows)
        with pytest.raises(ValidationError, match="positive"):
            load_training(path)

    def test_missing_column(self, tmp_path):
        path = write_csv(tmp_path / "t.csv", TRAINING_HEADER[:-1], [])
        with pytest.raises(SchemaError, match="parameter_count"):
            load_training(path)


class TestLoadShares:
    def test_groups_by_period_in_file_order(self, tmp_path):
        rows = [
            ["2024Q1", "a", "60.0"],
            ["2024Q2", "a", "55.0"],
            ["2024Q1", "b", "40.0"],
            ["2024Q2", "b", "45.0"],
        ]
        path = write_csv(tmp_path / "s.csv", ["period", "vendor", "share_percent"], rows)
        table = load_shares(path)
        assert list(table) == ["2024Q1", "2024Q2"]
        assert table["2024Q1"] == [("a", 60.0), ("b", 40.0)]

    def test_negative_share(self, tmp_path):
        rows = [["2024Q1", "a", "-1.0"]]
        path = write_csv(tmp_path / "s.csv", ["period", "vendor", "share_percent"], rows)
        with pytest.raises(ValidationError, match="non-negative"):
            load_shares(path)


class TestLoadFactors:
    def test_happy_path(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(
            json.dumps({
                "total_log_change": -2.3,
                "factors": [
                    {"name": "hardware", "share": 0.4, "log_price_change": -1.0}
                ],
            }),
            encoding="utf-8",
        )
        total, factors = load_factors(path)
        assert total == -2.3
        assert factors == [("hardware", 0.4, -1.0)]

    def test_missing_keys(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(json.dumps({"factors": []}), encoding="utf-8")
        with pytest.raises(SchemaError, match="total_log_change"):
            load_factors(path)

    def test_bad_factor_row(self, tmp_path):
        path = tmp_path / "f.json"
        path.write_text(
            json.dumps({"total_log_change": 0.1, "factors": [{"name": "x"}]}),
            encoding="utf-8",
        )
        with pytest.raises(SchemaError, match=r"factors\[0\]"):
            load_factors(path)


def test_file_fingerprint(tmp_path):
    path = tmp_path / "blob.bin"
    path.write_bytes(b"abc")
    # sha256("abc"), a published reference digest
    assert file_fingerprint(path) == (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    )
    path.write_bytes(b"abd")
    assert file_fingerprint(path) != (
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
    )
