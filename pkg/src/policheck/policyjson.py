"""The policy JSON document format: loading with strict validation, dumping
in canonical form.

Schema (UTF-8, unknown keys rejected):

    {
      "policy_type": "<registered type name>",
      "policies": [
        {"values": ["<pattern>", ...], "decision": "allow" | "deny"},
        ...
      ]
    }

``values`` holds one pattern per flattened component in declaration order.
"""

from __future__ import annotations

import json
from typing import Mapping

from .core import Policy, PolicySet, PolicyType, validate_pattern
from .errors import PolicyError, SchemaError, UnknownPolicyType


def load_policy_json(
    doc: str | bytes, registry: Mapping[str, PolicyType]
) -> PolicySet:
    """Parse and validate one policy document against the registry."""
    if isinstance(doc, bytes):
        doc = doc.decode("utf-8")
    try:
        data = json.loads(doc)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"$: not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("$: document must be a JSON object")
    extra = set(data) - {"policy_type", "policies"}
    if extra:
        raise SchemaError(f"$: unknown keys {sorted(extra)}")
    if "policy_type" not in data or "policies" not in data:
        raise SchemaError("$: 'policy_type' and 'policies' are required")
    name = data["policy_type"]
    if not isinstance(name, str):
        raise SchemaError("$.policy_type: must be a string")
    pt = registry.get(name)
    if pt is None:
        raise UnknownPolicyType(
            f"$.policy_type: {name!r} is not registered "
            f"(known: {sorted(registry)})"
        )
    if not isinstance(data["policies"], list):
        raise SchemaError("$.policies: must be an array")
    flat = pt.flat_components
    policies = []
    for i, entry in enumerate(data["policies"]):
        where = f"$.policies[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError(f"{where}: must be an object")
        extra = set(entry) - {"values", "decision"}
        if extra:
            raise SchemaError(f"{where}: unknown keys {sorted(extra)}")
        if "values" not in entry or "decision" not in entry:
            raise SchemaError(f"{where}: 'values' and 'decision' are required")
        values = entry["values"]
        if not isinstance(values, list) or not all(isinstance(v, str) for v in values):
            raise SchemaError(f"{where}.values: must be an array of strings")
        if len(values) != len(flat):
            raise SchemaError(
                f"{where}.values: expected {len(flat)} values "
                f"for {name!r}, got {len(values)}"
            )
        for j, v in enumerate(values):
            try:
                validate_pattern(flat[j][1], v)
            except PolicyError as exc:
                raise type(exc)(f"{where}.values[{j}]: {exc}") from None
        decision = entry["decision"]
        if decision not in ("allow", "deny"):
            raise SchemaError(f"{where}.decision: must be 'allow' or 'deny'")
        policies.append(Policy(pt, tuple(values), decision))
    return PolicySet(pt, tuple(policies))


def dump_policy_json(ps: PolicySet) -> str:
    """Canonical rendering; load(dump(ps)) reproduces ps byte-for-byte."""
    obj = {
        "policy_type": ps.policy_type.name,
        "policies": [
            {"values": list(p.values), "decision": p.decision} for p in ps.policies
        ],
    }
    return json.dumps(obj, indent=2) + "\n"


def load_registry_config(doc: str | bytes) -> dict[str, PolicyType]:
    """Registry built from a JSON config of tenant/service enumerations."""
    from .cloud import registry_from_config

    if isinstance(doc, bytes):
        doc = doc.decode("utf-8")
    try:
        data = json.loads(doc)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"registry config: not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise SchemaError("registry config: must be a JSON object")
    extra = set(data) - {"tenants", "services"}
    if extra:
        raise SchemaError(f"registry config: unknown keys {sorted(extra)}")
    for key in ("tenants", "services"):
        if key in data and (
            not isinstance(data[key], list)
            or not all(isinstance(v, str) for v in data[key])
        ):
            raise SchemaError(f"registry config: {key} must be an array of strings")
    return registry_from_config(data)
