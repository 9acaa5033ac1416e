"""
Content-addressed on-disk cache for expensive integrals.

Entries live at ``<dir>/<hash[:2]>/<hash>.json`` and store the full key next
to the payload; a read whose stored key differs from the requested one is a
miss. Writes go to a temporary file in the same directory and are renamed
into place, so concurrent processes never observe partial entries.
"""

from __future__ import annotations

import hashlib
import math
import os
import tempfile
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Generic, TypeVar

import orjson
import structlog
from pydantic import BaseModel, ValidationError
from tenacity import retry, retry_if_exception_type, stop_after_attempt, wait_exponential

from .. import __version__
from ..errors import CacheError

logger = structlog.get_logger(__name__).bind(component="cache")

M = TypeVar("M", bound=BaseModel)


def canonical(value: Any) -> Any:
    """JSON-ready copy with non-finite floats spelled as strings."""
    if isinstance(value, BaseModel):
        return canonical(value.model_dump())
    if isinstance(value, float):
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if isinstance(value, Mapping):
        return {str(k): canonical(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [canonical(v) for v in value]
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def canonical_json(value: Any) -> bytes:
    return orjson.dumps(canonical(value), option=orjson.OPT_SORT_KEYS)


def key_hash(key: Mapping[str, Any]) -> str:
    """sha256 over the key-sorted canonical JSON of ``key``."""
    return hashlib.sha256(canonical_json(key)).hexdigest()


@dataclass(frozen=True)
class CachedValue(Generic[M]):
    """A stage result and what it cost to obtain."""

    value: M
    evaluations: int
    hit: bool


class ResultCache:
    """Cache of stage results keyed by (stage, parameters, tolerances, seed, version)."""

    def __init__(self, directory: Path | str, *, enabled: bool = True) -> None:
        self.directory = Path(directory)
        self.enabled = enabled
        if enabled:
            try:
                self.directory.mkdir(parents=True, exist_ok=True)
            except OSError as e:
                raise CacheError(f"cannot create cache directory {self.directory}: {e}") from e

    @staticmethod
    def make_key(stage: str, **parts: Any) -> dict[str, Any]:
        return {"stage": stage, "code_version": __version__, **canonical(parts)}

    def path_for(self, digest: str) -> Path:
        return self.directory / digest[:2] / f"{digest}.json"

    def get_or_compute(
        self,
        key: Mapping[str, Any],
        model_type: type[M],
        compute: Callable[[], M],
        count: Callable[[M], int] | None = None,
    ) -> CachedValue[M]:
        """Return the cached value for ``key`` or compute, store and return it.

        ``count`` reports the integrand evaluations a fresh computation took;
        hits always report zero.
        """
        if not self.enabled:
            value = compute()
            return CachedValue(value=value, evaluations=count(value) if count else 0, hit=False)

        digest = key_hash(key)
        path = self.path_for(digest)
        cached = self._read(path, key, model_type)
        if cached is not None:
            logger.debug("Cache hit", stage=key.get("stage"), digest=digest[:12])
            return CachedValue(value=cached, evaluations=0, hit=True)

        value = compute()
        entry = {"key": canonical(key), "payload": value.model_dump(mode="json")}
        try:
            self._write(path, orjson.dumps(entry, option=orjson.OPT_SORT_KEYS))
        except OSError as e:
            logger.warning("Cache write failed", path=str(path), error=str(e))
        return CachedValue(value=value, evaluations=count(value) if count else 0, hit=False)

    def _read(self, path: Path, key: Mapping[str, Any], model_type: type[M]) -> M | None:
        if not path.exists():
            return None
        try:
            entry = orjson.loads(path.read_bytes())
            if entry["key"] != canonical(key):
                logger.debug("Cache key mismatch treated as miss", path=str(path))
                return None
            return model_type.model_validate(entry["payload"])
        except (OSError, orjson.JSONDecodeError, KeyError, TypeError, ValidationError) as e:
            logger.warning("Corrupt cache entry, recomputing", path=str(path), error=str(e))
            return None

    @retry(
        retry=retry_if_exception_type(OSError),
        stop=stop_after_attempt(3),
        wait=wait_exponential(multiplier=0.05, max=1.0),
        reraise=True,
    )
    def _write(self, path: Path, data: bytes) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
