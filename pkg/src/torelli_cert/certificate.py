"""Verification certificates and their canonical JSON form."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from . import __version__
from .errors import CertificateFormatError

SCHEMA_VERSION = 1
VERDICTS = ("pass", "fail", "inconclusive")
KEY_ORDER = ("proposition", "params", "conventions", "metrics", "verdict",
             "elapsed_ms", "tool_version", "transcript", "schema_version")
PARAM_KEYS = ("genus", "k", "kind")

MetricValue = Union[int, list]


@dataclass(frozen=True)
class Certificate:
    """Outcome of one proposition check.

    Metric keys ending in ``_ok`` are sub-check flags (0 or 1).  A ``pass``
    verdict is only accepted when every such flag is 1.
    """

    proposition: str
    params: Optional[dict]
    conventions: dict
    metrics: dict
    verdict: str
    elapsed_ms: int = 0
    tool_version: str = __version__
    transcript: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")
        for key, value in self.metrics.items():
            _check_metric(key, value)
        if self.verdict == "pass":
            failed = [k for k, v in self.metrics.items() if k.endswith("_ok") and v != 1]
            if failed:
                raise ValueError(f"pass verdict with failed sub-checks: {failed}")
        for mapping in (self.conventions, self.transcript):
            for k, v in mapping.items():
                if not isinstance(k, str) or not isinstance(v, str):
                    raise ValueError("conventions and transcript must map strings to strings")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def with_elapsed(self, elapsed_ms: int) -> Certificate:
        return replace(self, elapsed_ms=int(elapsed_ms))

    def to_dict(self) -> dict:
        params = None
        if self.params is not None:
            params = {k: self.params[k] for k in PARAM_KEYS if k in self.params}
        return {
            "proposition": self.proposition,
            "params": params,
            "conventions": dict(sorted(self.conventions.items())),
            "metrics": dict(sorted(self.metrics.items())),
            "verdict": self.verdict,
            "elapsed_ms": self.elapsed_ms,
            "tool_version": self.tool_version,
            "transcript": dict(sorted(self.transcript.items())),
            "schema_version": SCHEMA_VERSION,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict()) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Certificate:
        if not isinstance(data, Mapping):
            raise CertificateFormatError("certificate must be a JSON object")
        unknown = set(data) - set(KEY_ORDER)
        if unknown:
            raise CertificateFormatError(f"unknown certificate fields: {sorted(unknown)}")
        missing = set(KEY_ORDER) - set(data)
        if missing:
            raise CertificateFormatError(f"missing certificate fields: {sorted(missing)}")
        if data["schema_version"] != SCHEMA_VERSION:
            raise CertificateFormatError(
                f"unsupported schema version {data['schema_version']!r}")
        params = data["params"]
        if params is not None:
            if not isinstance(params, Mapping) or set(params) - set(PARAM_KEYS):
                raise CertificateFormatError("params must hold only genus, k and kind")
            params = dict(params)
        try:
            return cls(
                proposition=data["proposition"],
                params=params,
                conventions=dict(data["conventions"]),
                metrics=dict(data["metrics"]),
                verdict=data["verdict"],
                elapsed_ms=data["elapsed_ms"],
                tool_version=data["tool_version"],
                transcript=dict(data["transcript"]),
            )
        except (TypeError, ValueError) as exc:
            raise CertificateFormatError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> Certificate:
        try:
            data = json.loads(text, object_pairs_hook=_no_duplicates)
        except json.JSONDecodeError as exc:
            raise CertificateFormatError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise CertificateFormatError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _check_metric(key: str, value: Any) -> None:
    if isinstance(value, bool) or not isinstance(value, (int, list)):
        raise ValueError(f"metric {key!r} must be an integer or a list of integers")
    if isinstance(value, list) and any(isinstance(v, bool) or not isinstance(v, int)
                                       for v in value):
        raise ValueError(f"metric {key!r} must contain integers only")
    if key.endswith("_ok") and value not in (0, 1):
        raise ValueError(f"sub-check flag {key!r} must be 0 or 1")


def canonical_json(obj: Any, indent: int = 0) -> str:
    """Deterministic JSON: objects one key per line, lists of scalars inline."""
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k, ensure_ascii=False)}: {canonical_json(v, indent + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(canonical_json(v, indent) for v in obj) + "]"
    if isinstance(obj, float):
        raise TypeError("floating-point values are not allowed in certificates")
    return json.dumps(obj, ensure_ascii=False)


def emit(cert: Certificate, path: Union[str, os.PathLike]) -> None:
    """Write the certificate atomically (temp file in the same directory, then rename)."""
    path = Path(path)
    data = cert.to_json().encode("utf-8")
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    except OSError as exc:
        raise OSError(f"cannot write certificate to {path}: {exc}") from exc
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except OSError as exc:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise OSError(f"cannot write certificate to {path}: {exc}") from exc


def load(path: Union[str, os.PathLike]) -> Certificate:
    return Certificate.from_json(Path(path).read_text(encoding="utf-8"))


def flag(ok: bool) -> int:
    return 1 if ok else 0
