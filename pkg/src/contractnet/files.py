"""Instance files: JSON with exact "p/q" rationals and binary bundle labels.

The canonical form sorts keys and serialises bundles as binary label
strings (leftmost character is the first resource), so store/load round
trips are byte-identical.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Optional, Union

from .constructions.instance import ALL_CLAIMS, ConstructedInstance
from .deals import Deal, Rationality, StructuralClass, m_contract
from .model import (
    AdditiveUtility,
    Allocation,
    ClosedFormUtility,
    ResourceSetting,
    TableUtility,
    Utility,
    ZeroOneUtility,
    bundle_to_label,
    label_to_bundle,
    utility_as_table,
)

FORMAT_VERSION = "contract-instance/1"


class InstanceFormatError(ValueError):
    """The file is not a well-formed instance document."""


def format_rational(value: Fraction) -> str:
    return str(value)


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceFormatError(f"bad rational {text!r}") from exc


def structural_to_str(cls: StructuralClass) -> str:
    return str(cls)


def structural_from_str(text: str) -> StructuralClass:
    if text.startswith("M(") and text.endswith(")"):
        return m_contract(int(text[2:-1]))
    try:
        return StructuralClass(text)
    except ValueError as exc:
        raise InstanceFormatError(f"unknown structural class {text!r}") from exc


def rationality_from_str(text: str) -> Rationality:
    for member in Rationality:
        if member.value == text:
            return member
    raise InstanceFormatError(f"unknown rationality class {text!r}")


def utility_to_json(utility: Utility, m: int) -> dict:
    if isinstance(utility, ClosedFormUtility):
        utility = utility_as_table(utility, m)
    if isinstance(utility, TableUtility):
        return {
            "kind": "table",
            "default": format_rational(utility.default),
            "entries": {
                bundle_to_label(b, m): format_rational(v)
                for b, v in sorted(utility.entries.items())
            },
        }
    if isinstance(utility, AdditiveUtility):
        return {
            "kind": "additive",
            "values": [format_rational(v) for v in utility.singleton_values],
        }
    if isinstance(utility, ZeroOneUtility):
        return {
            "kind": "zero-one",
            "ones": sorted(bundle_to_label(b, m) for b in utility.ones),
        }
    raise InstanceFormatError(f"unsupported utility kind {type(utility).__name__}")


def utility_from_json(doc: dict, m: int) -> Utility:
    kind = doc.get("kind")
    if kind == "table":
        return TableUtility(
            {
                label_to_bundle(label): parse_rational(text)
                for label, text in doc.get("entries", {}).items()
            },
            default=parse_rational(doc.get("default", "0")),
        )
    if kind == "additive":
        values = [parse_rational(text) for text in doc["values"]]
        if len(values) != m:
            raise InstanceFormatError("additive utility needs one value per resource")
        return AdditiveUtility(tuple(values))
    if kind == "zero-one":
        return ZeroOneUtility(frozenset(label_to_bundle(s) for s in doc["ones"]))
    raise InstanceFormatError(f"unknown utility kind {kind!r}")


def _allocation_to_json(allocation: Allocation) -> list[str]:
    return list(allocation.labels())


def _allocation_from_json(labels: list[str], m: int, n: int) -> Allocation:
    allocation = Allocation.from_labels(labels)
    if allocation.resource_count != m or allocation.agent_count != n:
        raise InstanceFormatError("allocation does not match the setting shape")
    return allocation


@dataclass(frozen=True)
class InstanceFile:
    """On-disk document: a setting plus optional deal, path and claims."""

    setting: ResourceSetting
    resource_names: tuple[str, ...] = ()
    structural: Optional[StructuralClass] = None
    rationality: Optional[Rationality] = None
    deal: Optional[Deal] = None
    expected_path: Optional[tuple[Allocation, ...]] = None
    claims: frozenset[str] = frozenset()
    construction: Optional[str] = None
    params: dict = field(default_factory=dict)
    length_bound: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if not self.resource_names:
            object.__setattr__(
                self,
                "resource_names",
                tuple(f"r{i + 1}" for i in range(self.setting.resource_count)),
            )
        if self.claims and not self.claims <= ALL_CLAIMS:
            raise InstanceFormatError(f"unknown claims {set(self.claims) - ALL_CLAIMS}")

    @classmethod
    def from_instance(cls, instance: ConstructedInstance) -> "InstanceFile":
        return cls(
            setting=instance.setting,
            structural=instance.structural,
            rationality=instance.rationality,
            deal=instance.designated_deal,
            expected_path=instance.expected_path,
            claims=instance.claims,
            construction=instance.name,
            params=dict(instance.params),
            length_bound=instance.length_bound,
        )

    def to_instance(self) -> ConstructedInstance:
        """Rebuild the constructed-instance view; needs a path and classes."""
        if (
            self.expected_path is None
            or self.structural is None
            or self.rationality is None
        ):
            raise InstanceFormatError(
                "file carries no expected path or deal classes to verify against"
            )
        return ConstructedInstance(
            name=self.construction or "file",
            params=self.params,
            setting=self.setting,
            expected_path=self.expected_path,
            structural=self.structural,
            rationality=self.rationality,
            claims=self.claims,
            length_bound=self.length_bound,
        )


def instance_to_json(doc: InstanceFile) -> dict:
    m = doc.setting.resource_count
    out: dict = {
        "format": FORMAT_VERSION,
        "agents": doc.setting.agent_count,
        "resources": m,
        "resource_names": list(doc.resource_names),
        "utilities": [utility_to_json(u, m) for u in doc.setting.utilities],
        "claims": sorted(doc.claims),
    }
    if doc.structural is not None:
        out["structural"] = structural_to_str(doc.structural)
    if doc.rationality is not None:
        out["rationality"] = doc.rationality.value
    if doc.deal is not None:
        out["deal"] = {
            "from": _allocation_to_json(doc.deal.source),
            "to": _allocation_to_json(doc.deal.target),
        }
    if doc.expected_path is not None:
        out["expected_path"] = [_allocation_to_json(a) for a in doc.expected_path]
    if doc.construction is not None:
        out["construction"] = {
            "name": doc.construction,
            "params": {k: _param_to_json(v) for k, v in sorted(doc.params.items())},
        }
    if doc.length_bound is not None:
        out["length_bound"] = format_rational(doc.length_bound)
    return out


def _param_to_json(value):
    return value if isinstance(value, (int, str, bool)) else str(value)


def instance_from_json(doc: dict) -> InstanceFile:
    if doc.get("format") != FORMAT_VERSION:
        raise InstanceFormatError(f"unsupported format {doc.get('format')!r}")
    try:
        n = int(doc["agents"])
        m = int(doc["resources"])
        utilities = tuple(utility_from_json(u, m) for u in doc["utilities"])
    except KeyError as exc:
        raise InstanceFormatError(f"missing field {exc}") from exc
    if len(utilities) != n:
        raise InstanceFormatError("one utility per agent required")
    setting = ResourceSetting(m, utilities)
    names = tuple(doc.get("resource_names", ()))
    structural = (
        structural_from_str(doc["structural"]) if "structural" in doc else None
    )
    rationality = (
        rationality_from_str(doc["rationality"]) if "rationality" in doc else None
    )
    deal = None
    if "deal" in doc:
        deal = Deal(
            _allocation_from_json(doc["deal"]["from"], m, n),
            _allocation_from_json(doc["deal"]["to"], m, n),
        )
    path = None
    if "expected_path" in doc:
        path = tuple(
            _allocation_from_json(labels, m, n) for labels in doc["expected_path"]
        )
    construction = None
    params: dict = {}
    if "construction" in doc:
        construction = doc["construction"].get("name")
        params = dict(doc["construction"].get("params", {}))
    bound = (
        parse_rational(doc["length_bound"]) if "length_bound" in doc else None
    )
    return InstanceFile(
        setting=setting,
        resource_names=names,
        structural=structural,
        rationality=rationality,
        deal=deal,
        expected_path=path,
        claims=frozenset(doc.get("claims", [])),
        construction=construction,
        params=params,
        length_bound=bound,
    )


def dumps_instance(doc: InstanceFile) -> str:
    return json.dumps(instance_to_json(doc), indent=2, sort_keys=True) + "\n"


def save_instance(doc: InstanceFile, stream: IO[str]) -> None:
    stream.write(dumps_instance(doc))


def load_instance(stream: Union[IO[str], str]) -> InstanceFile:
    text = stream if isinstance(stream, str) else stream.read()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise InstanceFormatError("instance document must be a JSON object")
    return instance_from_json(raw)
