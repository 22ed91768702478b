"""Serializable check reports."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

from .exact import ExactScalar
from .geometry import VectorConfig

SCHEMA = 1


def _jsonable(x):
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, ExactScalar):
        return str(x)
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "tolist"):
        return _jsonable(x.tolist())
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return x


def config_digest(cfg: VectorConfig) -> str:
    """sha256 of a canonical text form of the configuration."""
    parts = [f"dim={cfg.dim}", f"mode={cfg.mode}"]
    for vec, c in zip(cfg.vectors, cfg.mults):
        comps = ",".join(str(x) if isinstance(x, ExactScalar) else repr(complex(x)) for x in vec)
        parts.append(f"[{comps}]:{c!r}")
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": _jsonable(self.residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "details": _jsonable(self.details),
        }

    @classmethod
    def from_dict(cls, d: dict) -> CheckResult:
        res = d["residual"]
        return cls(d["name"], float(res) if isinstance(res, str) else res, d["tolerance"], d["passed"], d.get("details", {}))


@dataclass
class CheckReport:
    target: str
    params: dict = field(default_factory=dict)
    checks: list[CheckResult] = field(default_factory=list)
    points: dict = field(default_factory=dict)
    digest: str = ""
    hypotheses: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    schema: int = SCHEMA

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, residual: float, tolerance: float, passed: bool | None = None, **details) -> CheckResult:
        ok = residual < tolerance if passed is None else passed
        res = CheckResult(name, float(residual), float(tolerance), bool(ok), details)
        self.checks.append(res)
        return res

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "target": self.target,
            "params": _jsonable(self.params),
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            "points": _jsonable(self.points),
            "config_digest": self.digest,
            "hypotheses": _jsonable(self.hypotheses),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: dict) -> CheckReport:
        return cls(
            target=d["target"],
            params=d.get("params", {}),
            checks=[CheckResult.from_dict(c) for c in d.get("checks", [])],
            points=d.get("points", {}),
            digest=d.get("config_digest", ""),
            hypotheses=d.get("hypotheses", {}),
            warnings=list(d.get("warnings", [])),
            schema=d.get("schema", SCHEMA),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> CheckReport:
        return cls.from_dict(json.loads(text))

    def exit_code(self) -> int:
        if not self.passed:
            return 1
        return 2 if self.warnings else 0
