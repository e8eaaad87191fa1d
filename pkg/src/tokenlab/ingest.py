"""Dataset ingestion and persistence.

Four input surfaces: an OpenRouter-compatible HTTP catalog endpoint (with an
offline fixture mode), CSV loaders for the milestone and training panels and
the vendor-share table, a JSON factor file for growth accounting, and a
versioned JSON snapshot format for fetched catalogs. Per-token prices are
normalized to USD per million tokens at parse time via decimal arithmetic,
so 0.00000015 becomes exactly 0.15.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import asdict, dataclass
from datetime import date, datetime, timezone
from decimal import Decimal, InvalidOperation
from pathlib import Path

import requests

from .errors import (
    CatalogError,
    CredentialError,
    PayloadError,
    SchemaError,
    ValidationError,
)
from .records import (
    DEFAULT_BLEND_WEIGHTS,
    DEFAULT_TIER_THRESHOLDS,
    PriceRecord,
    Region,
    Tier,
    TrainingRecord,
    validate_dataset,
)

SNAPSHOT_SCHEMA_VERSION = 1

DEFAULT_CREDENTIAL_ENV = "TOKENLAB_API_KEY"

MILESTONE_COLUMNS = (
    "model_id", "vendor", "observed_date", "input_price", "output_price",
    "quality_score", "reasoning", "open_weight", "region",
)
TRAINING_COLUMNS = (
    "model_id", "vendor", "region", "release_date",
    "training_cost_usd", "training_compute_flop", "parameter_count",
)
SHARES_COLUMNS = ("period", "vendor", "share_percent")


@dataclass(frozen=True)
class RunConfig:
    """Run-level parameters shared by the CLI subcommands."""

    endpoint: str = "https://openrouter.ai/api/v1"
    credential_env: str = DEFAULT_CREDENTIAL_ENV
    fixture_path: str | None = None
    blend_weights: tuple[float, float] = DEFAULT_BLEND_WEIGHTS
    tier_thresholds: tuple[float, float] = DEFAULT_TIER_THRESHOLDS
    chow_min_segment: int = 8
    bootstrap_b: int = 1000
    bootstrap_seed: int = 20260301
    winsor_lower: float = 5.0
    winsor_upper: float = 95.0
    dea_tolerance: float = 1e-9
    malmquist_representative: str = "best-ratio"
    retries: int = 3
    backoff: float = 0.5

    def __post_init__(self) -> None:
        if not (0 < self.winsor_lower < 50):
            raise ValidationError(
                f"winsor_lower must lie in (0, 50), got {self.winsor_lower}"
            )
        if not (50 < self.winsor_upper < 100):
            raise ValidationError(
                f"winsor_upper must lie in (50, 100), got {self.winsor_upper}"
            )
        for name in ("chow_min_segment", "bootstrap_b", "dea_tolerance",
                     "retries", "backoff"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be positive")
        low, high = self.tier_thresholds
        if not 0 < low < high:
            raise ValidationError(f"tier thresholds must be increasing, got {self.tier_thresholds}")
        if any(w < 0 for w in self.blend_weights) or sum(self.blend_weights) == 0:
            raise ValidationError(f"bad blend weights {self.blend_weights}")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"config {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise SchemaError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for pair_key in ("blend_weights", "tier_thresholds"):
            if pair_key in raw and isinstance(raw[pair_key], list):
                raw = dict(raw, **{pair_key: tuple(raw[pair_key])})
        return cls(**raw)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["blend_weights"] = list(self.blend_weights)
        out["tier_thresholds"] = list(self.tier_thresholds)
        return out

    def config_hash(self) -> str:
        """Stable digest of the canonical JSON serialization."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class CatalogSnapshot:
    fetched_at: datetime
    source: str
    records: tuple[PriceRecord, ...]


def normalize_per_token_price(value, field_name: str) -> float:
    """Convert a per-token price quote (string or number) to $/M tokens."""
    try:
        per_token = Decimal(str(value))
    except (InvalidOperation, TypeError) as exc:
        raise PayloadError(f"{field_name}: cannot parse price {value!r}") from exc
    return float(per_token * (10**6))


def parse_catalog_payload(
    payload: dict,
    source: str,
    fetched_at: datetime | None = None,
) -> CatalogSnapshot:
    """Build a validated snapshot from an OpenRouter-style payload.

    Requires data[].id and data[].pricing.{prompt,completion}; honours the
    optional per-model fields context_length, quality_score, reasoning,
    open_weight, and region when present. The vendor is the namespace prefix
    of the model id.
    """
    if fetched_at is None:
        fetched_at = datetime.now(timezone.utc)
    if not isinstance(payload, dict) or "data" not in payload:
        raise PayloadError("payload field 'data' is missing")
    models = payload["data"]
    if not isinstance(models, list):
        raise PayloadError("payload field 'data' must be a list")

    records = []
    observed = fetched_at.date()
    for i, model in enumerate(models):
        if not isinstance(model, dict) or "id" not in model:
            raise PayloadError(f"data[{i}].id is missing")
        model_id = str(model["id"])
        pricing = model.get("pricing")
        if not isinstance(pricing, dict):
            raise PayloadError(f"data[{i}].pricing is missing for {model_id}")
        if "prompt" not in pricing or "completion" not in pricing:
            raise PayloadError(
                f"data[{i}].pricing.prompt/completion is missing for {model_id}"
            )
        input_price = normalize_per_token_price(
            pricing["prompt"], f"data[{i}].pricing.prompt"
        )
        output_price = normalize_per_token_price(
            pricing["completion"], f"data[{i}].pricing.completion"
        )
        vendor = model_id.split("/", 1)[0] if "/" in model_id else "unknown"
        region_raw = model.get("region")
        try:
            region = Region.parse(region_raw) if region_raw else Region.OTHER
        except ValidationError as exc:
            raise PayloadError(f"data[{i}].region: {exc}") from exc
        quality = model.get("quality_score")
        records.append(
            PriceRecord(
                model_id=model_id,
                vendor=vendor,
                observed_date=observed,
                input_price=input_price,
                output_price=output_price,
                context_window=model.get("context_length"),
                quality_score=float(quality) if quality is not None else None,
                reasoning=bool(model.get("reasoning", False)),
                open_weight=bool(model.get("open_weight", False)),
                region=region,
            )
        )

    violations = validate_dataset(records)
    if violations:
        detail = "; ".join(f"[{v.index}] {v.rule}: {v.message}" for v in violations[:5])
        raise PayloadError(f"payload produced {len(violations)} invalid record(s): {detail}")
    return CatalogSnapshot(fetched_at=fetched_at, source=source, records=tuple(records))


def fetch_catalog(
    endpoint: str,
    credential: str | None = None,
    fixture_path: str | Path | None = None,
    retries: int = 3,
    backoff: float = 0.5,
    timeout: float = 30.0,
    session: requests.Session | None = None,
) -> CatalogSnapshot:
    """Fetch GET {endpoint}/models, or read a local fixture payload.

    Network errors and 5xx responses are retried with exponential backoff
    (backoff * 2^attempt seconds) up to `retries` times; credential
    rejections fail immediately.
    """
    if fixture_path is not None:
        path = Path(fixture_path)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise CatalogError(f"fixture payload {path} does not exist") from None
        except json.JSONDecodeError as exc:
            raise PayloadError(f"fixture payload {path} is not valid JSON: {exc}") from exc
        return parse_catalog_payload(payload, source=f"fixture:{path}")

    url = endpoint.rstrip("/") + "/models"
    headers = {}
    if credential:
        headers["Authorization"] = f"Bearer {credential}"
    own_session = session is None
    sess = session or requests.Session()
    try:
        last_error: Exception | None = None
        for attempt in range(retries + 1):
            if attempt:
                time.sleep(backoff * 2 ** (attempt - 1))
            try:
                response = sess.get(url, headers=headers, timeout=timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code in (401, 403):
                raise CredentialError(f"{url} rejected the credential ({response.status_code})")
            if response.status_code >= 500:
                last_error = CatalogError(f"{url} returned {response.status_code}")
                continue
            if response.status_code != 200:
                raise CatalogError(f"{url} returned {response.status_code}")
            try:
                payload = response.json()
            except ValueError as exc:
                raise PayloadError(f"{url} returned a non-JSON body") from exc
            return parse_catalog_payload(payload, source=url)
        raise CatalogError(f"giving up on {url} after {retries + 1} attempts: {last_error}")
    finally:
        if own_session:
            sess.close()


def _require_columns(reader: csv.DictReader, required: tuple[str, ...], path: Path) -> None:
    have = reader.fieldnames or []
    missing = [c for c in required if c not in have]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")


def _parse_date(text: str, path: Path, line: int, column: str) -> date:
    try:
        return date.fromisoformat(text.strip())
    except ValueError:
        raise ValidationError(f"{path}:{line}: cannot parse {column} {text!r}") from None


def _parse_float(text: str, path: Path, line: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValidationError(f"{path}:{line}: cannot parse {column} {text!r}") from None


def _parse_flag(text: str, path: Path, line: int, column: str) -> bool:
    value = text.strip()
    if value not in ("0", "1"):
        raise ValidationError(f"{path}:{line}: {column} must be 0 or 1, got {text!r}")
    return value == "1"


def load_milestones(path: str | Path) -> list[PriceRecord]:
    """Load the milestone price panel, sorted by observation date.

    Raises SchemaError for missing columns and ValidationError (with the file
    line number) for unparseable rows or invariant violations.
    """
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        _require_columns(reader, MILESTONE_COLUMNS, path)
        for line, row in enumerate(reader, start=2):
            quality_raw = (row.get("quality_score") or "").strip()
            # tier_hint is advisory; classification is always derived from
            # the input price, but a malformed hint is still a data error
            hint = (row.get("tier_hint") or "").strip()
            if hint:
                try:
                    Tier.parse(hint)
                except ValidationError as exc:
                    raise ValidationError(f"{path}:{line}: {exc}") from None
            try:
                region = Region.parse(row["region"])
            except ValidationError as exc:
                raise ValidationError(f"{path}:{line}: {exc}") from None
            records.append(
                PriceRecord(
                    model_id=row["model_id"].strip(),
                    vendor=row["vendor"].strip(),
                    observed_date=_parse_date(row["observed_date"], path, line, "observed_date"),
                    input_price=_parse_float(row["input_price"], path, line, "input_price"),
                    output_price=_parse_float(row["output_price"], path, line, "output_price"),
                    quality_score=(
                        _parse_float(quality_raw, path, line, "quality_score")
                        if quality_raw else None
                    ),
                    reasoning=_parse_flag(row["reasoning"], path, line, "reasoning"),
                    open_weight=_parse_flag(row["open_weight"], path, line, "open_weight"),
                    region=region,
                )
            )
    records.sort(key=lambda r: r.observed_date)
    violations = validate_dataset(records)
    if violations:
        detail = "; ".join(f"[{v.index}] {v.rule}" for v in violations[:5])
        raise ValidationError(f"{path}: {len(violations)} invalid record(s): {detail}")
    return records


def load_training(path: str | Path) -> list[TrainingRecord]:
    """Load the training-cost panel, sorted by release date."""
    path = Path(path)
    records = []
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        _require_columns(reader, TRAINING_COLUMNS, path)
        for line, row in enumerate(reader, start=2):
            try:
                region = Region.parse(row["region"])
            except ValidationError as exc:
                raise ValidationError(f"{path}:{line}: {exc}") from None
            cost = _parse_float(row["training_cost_usd"], path, line, "training_cost_usd")
            compute = _parse_float(row["training_compute_flop"], path, line, "training_compute_flop")
            params = _parse_float(row["parameter_count"], path, line, "parameter_count")
            if cost <= 0 or compute <= 0 or params <= 0:
                raise ValidationError(
                    f"{path}:{line}: cost, compute, and parameters must be positive"
                )
            records.append(
                TrainingRecord(
                    model_id=row["model_id"].strip(),
                    vendor=row["vendor"].strip(),
                    region=region,
                    release_date=_parse_date(row["release_date"], path, line, "release_date"),
                    training_cost=cost,
                    training_compute=compute,
                    parameter_count=params,
                )
            )
    records.sort(key=lambda r: r.release_date)
    return records


def load_shares(path: str | Path) -> dict[str, list[tuple[str, float]]]:
    """Load vendor shares as {period: [(vendor, share_percent), ...]}.

    Periods keep file order; shares are validated non-negative here and for
    the 100-point sum by the concentration functions.
    """
    path = Path(path)
    table: dict[str, list[tuple[str, float]]] = {}
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        _require_columns(reader, SHARES_COLUMNS, path)
        for line, row in enumerate(reader, start=2):
            share = _parse_float(row["share_percent"], path, line, "share_percent")
            if share < 0:
                raise ValidationError(f"{path}:{line}: share_percent must be non-negative")
            table.setdefault(row["period"].strip(), []).append(
                (row["vendor"].strip(), share)
            )
    return table


def load_factors(path: str | Path) -> tuple[float, list[tuple[str, float, float]]]:
    """Load growth-accounting inputs: total log change and factor rows."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc}") from exc
    if "total_log_change" not in raw or "factors" not in raw:
        raise SchemaError(f"{path}: needs total_log_change and factors")
    factors = []
    for i, row in enumerate(raw["factors"]):
        try:
            factors.append(
                (str(row["name"]), float(row["share"]), float(row["log_price_change"]))
            )
        except (KeyError, TypeError, ValueError):
            raise SchemaError(
                f"{path}: factors[{i}] needs name, share, log_price_change"
            ) from None
    return float(raw["total_log_change"]), factors


def _record_to_dict(record: PriceRecord) -> dict:
    return {
        "model_id": record.model_id,
        "vendor": record.vendor,
        "observed_date": record.observed_date.isoformat(),
        "input_price": record.input_price,
        "output_price": record.output_price,
        "context_window": record.context_window,
        "quality_score": record.quality_score,
        "reasoning": record.reasoning,
        "open_weight": record.open_weight,
        "region": record.region.value,
    }


def _record_from_dict(raw: dict) -> PriceRecord:
    return PriceRecord(
        model_id=raw["model_id"],
        vendor=raw["vendor"],
        observed_date=date.fromisoformat(raw["observed_date"]),
        input_price=float(raw["input_price"]),
        output_price=float(raw["output_price"]),
        context_window=raw.get("context_window"),
        quality_score=raw.get("quality_score"),
        reasoning=bool(raw.get("reasoning", False)),
        open_weight=bool(raw.get("open_weight", False)),
        region=Region(raw.get("region", "OTHER")),
    )


def persist_snapshot(snapshot: CatalogSnapshot, path: str | Path) -> None:
    """Write a snapshot as versioned, diff-friendly JSON."""
    document = {
        "schema_version": SNAPSHOT_SCHEMA_VERSION,
        "fetched_at": snapshot.fetched_at.isoformat(),
        "source": snapshot.source,
        "records": [_record_to_dict(r) for r in snapshot.records],
    }
    Path(path).write_text(
        json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_snapshot(path: str | Path) -> CatalogSnapshot:
    """Read a snapshot back; SchemaError on a wrong or missing version."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid snapshot JSON: {exc}") from exc
    version = raw.get("schema_version") if isinstance(raw, dict) else None
    if version != SNAPSHOT_SCHEMA_VERSION:
        raise SchemaError(
            f"{path}: snapshot schema version {version!r}, "
            f"expected {SNAPSHOT_SCHEMA_VERSION}"
        )
    return CatalogSnapshot(
        fetched_at=datetime.fromisoformat(raw["fetched_at"]),
        source=raw["source"],
        records=tuple(_record_from_dict(r) for r in raw["records"]),
    )


def file_fingerprint(path: str | Path) -> str:
    """SHA-256 of a file's bytes, for run metadata."""
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
