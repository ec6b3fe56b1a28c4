"""Job configuration: JSON schema, validation, diagnostics.

Schema::

    {
      "target":   {"factors": [int, ...]},
      "divisors": [{"name": str, "coeffs": [int, ...]}, ...],
      "roots":    [int, ...],          # optional
      "cap":      int,
      "m":        int                  # optional contact-order bound
    }

Every violation is reported with the offending field path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .targets import (
    Divisor,
    DivisorArrangement,
    RootData,
    TargetSpace,
    check_coprime,
)

MAX_CAP = 64


class ConfigError(ValueError):
    """Malformed or invalid job configuration."""


@dataclass(frozen=True)
class JobConfig:
    target: TargetSpace
    arrangement: DivisorArrangement
    roots: RootData | None
    cap: int
    m: int | None

    def require_roots(self) -> RootData:
        if self.roots is None:
            raise ConfigError("this command needs root orders; set \"roots\"")
        return self.roots

    def contact_bound(self, default: int) -> int:
        return self.m if self.m is not None else default


def _expect(condition: bool, where: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{where}: {message}")


def _int_list(value, where: str) -> list[int]:
    _expect(isinstance(value, list) and value, where, "expected a nonempty list")
    for idx, item in enumerate(value):
        _expect(
            isinstance(item, int) and not isinstance(item, bool),
            f"{where}[{idx}]",
            "expected an integer",
        )
    return list(value)


def parse_config(source: str | Path) -> JobConfig:
    """Parse a JSON job description from a path or inline text."""
    text = source
    path = Path(str(source))
    if path.exists() and path.is_file():
        text = path.read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"line {err.lineno}, column {err.colno}: {err.msg}") from err
    return config_from_dict(doc)


def config_from_dict(doc) -> JobConfig:
    _expect(isinstance(doc, dict), "document", "expected a JSON object")
    unknown = set(doc) - {"target", "divisors", "roots", "cap", "m"}
    _expect(not unknown, "document", f"unknown fields {sorted(unknown)}")

    target_doc = doc.get("target")
    _expect(isinstance(target_doc, dict), "target", "expected an object")
    factors = _int_list(target_doc.get("factors"), "target.factors")
    _expect(
        all(n >= 1 for n in factors), "target.factors", "factors must be positive"
    )
    target = TargetSpace(tuple(factors))

    divisors_doc = doc.get("divisors")
    _expect(
        isinstance(divisors_doc, list) and divisors_doc,
        "divisors",
        "expected a nonempty list",
    )
    divisors = []
    for idx, item in enumerate(divisors_doc):
        where = f"divisors[{idx}]"
        _expect(isinstance(item, dict), where, "expected an object")
        name = item.get("name")
        _expect(isinstance(name, str) and name, f"{where}.name", "expected a name")
        coeffs = _int_list(item.get("coeffs"), f"{where}.coeffs")
        _expect(
            len(coeffs) == target.rank,
            f"{where}.coeffs",
            f"expected {target.rank} coefficients for this target",
        )
        _expect(
            all(c >= 0 for c in coeffs) and any(coeffs),
            f"{where}.coeffs",
            "divisor not nef on this target",
        )
        divisors.append(Divisor(name, tuple(coeffs)))
    names = [d.name for d in divisors]
    _expect(len(set(names)) == len(names), "divisors", "names must be distinct")
    arrangement = DivisorArrangement(tuple(divisors))

    roots = None
    if doc.get("roots") is not None:
        orders = _int_list(doc["roots"], "roots")
        _expect(
            len(orders) == arrangement.n, "roots", "one order per divisor required"
        )
        _expect(all(r >= 1 for r in orders), "roots", "orders must be positive")
        _expect(
            check_coprime(tuple(orders)), "roots", "roots must be pairwise coprime"
        )
        roots = RootData(tuple(orders))

    cap = doc.get("cap")
    _expect(
        isinstance(cap, int) and not isinstance(cap, bool), "cap", "expected an integer"
    )
    _expect(1 <= cap <= MAX_CAP, "cap", f"cap must lie in 1..{MAX_CAP}")

    m = doc.get("m")
    if m is not None:
        _expect(
            isinstance(m, int) and not isinstance(m, bool) and m >= 1,
            "m",
            "expected a positive integer",
        )

    return JobConfig(
        target=target, arrangement=arrangement, roots=roots, cap=cap, m=m
    )
