"""Ready-made policy types for cloud APIs and the permission-spec connector.

The two built-in policy types model a generic multi-tenant HTTP API and a
multi-tenant file-permission service.  Tenant and service enumerations are
deployment configuration, so both types are exposed as small factory
functions taking those lists; module-level defaults cover tests and quick
starts.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import (
    ALLOW,
    CharSet,
    MatchingStrategy,
    Policy,
    PolicySet,
    PolicyType,
    StringComponentDef,
    StringEnumComponentDef,
    TupleComponentDef,
)
from .errors import MalformedPermSpec

ALNUM = string.digits + string.ascii_uppercase + string.ascii_lowercase

ALNUM_CHARSET = CharSet.from_string(ALNUM)
HTTP_PATH_CHARSET = CharSet.from_string(ALNUM + "/*")
SYSTEM_ID_CHARSET = CharSet.from_string(ALNUM + ".-*")
FILE_PATH_CHARSET = CharSet.from_string(ALNUM + "/*._-")

HTTP_ACTIONS = ("GET", "POST", "PUT", "DELETE")
PERM_LEVELS = ("read", "modify", "execute")

DEFAULT_TENANTS = ("a2cps", "cii", "dev", "tacc")
DEFAULT_SERVICES = ("actors", "apps", "files", "jobs", "systems")

_W = MatchingStrategy.WILDCARD


def http_api_policy_type(
    tenants: Sequence[str] = DEFAULT_TENANTS,
    services: Sequence[str] = DEFAULT_SERVICES,
) -> PolicyType:
    """Policies over a multi-tenant HTTP API: who may call which endpoint."""
    tenant = StringEnumComponentDef("tenant", tuple(tenants), _W)
    return PolicyType(
        name="http_api",
        components=(
            TupleComponentDef(
                "principal",
                (tenant, StringComponentDef("username", ALNUM_CHARSET, 64, _W)),
            ),
            TupleComponentDef(
                "resource",
                (
                    tenant,
                    StringEnumComponentDef("service", tuple(services), _W),
                    StringComponentDef("path", HTTP_PATH_CHARSET, 255, _W),
                ),
            ),
            StringEnumComponentDef("action", HTTP_ACTIONS, _W),
        ),
    )


def tapis_files_policy_type(tenants: Sequence[str] = DEFAULT_TENANTS) -> PolicyType:
    """Policies over per-file permissions: tenant, system, level, and path."""
    tenant = StringEnumComponentDef("tenant", tuple(tenants), _W)
    return PolicyType(
        name="tapis_files",
        components=(
            TupleComponentDef(
                "principal",
                (tenant, StringComponentDef("username", ALNUM_CHARSET, 64, _W)),
            ),
            TupleComponentDef(
                "perm",
                (
                    tenant,
                    StringComponentDef("system_id", SYSTEM_ID_CHARSET, 80, _W),
                    StringEnumComponentDef("level", PERM_LEVELS, _W),
                    StringComponentDef("path", FILE_PATH_CHARSET, 255, _W),
                ),
            ),
        ),
    )


@dataclass(frozen=True)
class PermSpec:
    """Parsed permission spec: ``files:<tenant>:<levels>:<system_id>:<path>``."""

    raw: str
    tenant: str
    levels: tuple[str, ...]
    system_id: str
    path: str


def parse_perm_spec(raw: str) -> PermSpec:
    """Parse one spec line; levels are normalized to (read, modify, execute) order.

    The level field is a comma list over the known levels, or ``*`` for all
    three.  Paths must be absolute.  A path containing ``:`` cannot be
    represented (the separator is not escapable) and is rejected.
    """
    parts = raw.split(":")
    if len(parts) != 5:
        raise MalformedPermSpec(
            f"expected 5 colon-separated fields, got {len(parts)}: {raw!r}"
        )
    prefix, tenant, levels_raw, system_id, path = parts
    if prefix != "files":
        raise MalformedPermSpec(f"unknown prefix {prefix!r} (expected 'files'): {raw!r}")
    if not tenant or not system_id or not path:
        raise MalformedPermSpec(f"empty field in perm spec: {raw!r}")
    if not path.startswith("/"):
        raise MalformedPermSpec(f"path must start with '/': {raw!r}")
    if levels_raw == "*":
        levels = PERM_LEVELS
    else:
        seen = set()
        for token in levels_raw.split(","):
            if token not in PERM_LEVELS:
                raise MalformedPermSpec(f"unknown permission level {token!r}: {raw!r}")
            seen.add(token)
        levels = tuple(lv for lv in PERM_LEVELS if lv in seen)
    return PermSpec(raw=raw, tenant=tenant, levels=levels, system_id=system_id, path=path)


def render_perm_spec(spec: PermSpec) -> str:
    """Canonical text form; inverse of parse up to level-list normalization."""
    levels = "*" if spec.levels == PERM_LEVELS else ",".join(spec.levels)
    return f"files:{spec.tenant}:{levels}:{spec.system_id}:{spec.path}"


def perm_specs_to_policy_set(
    entries: Iterable[tuple[str, str, str]],
    policy_type: PolicyType | None = None,
    decision: str = ALLOW,
) -> PolicySet:
    """Turn (username, tenant, perm-spec) triples into a file-policy set.

    Each entry yields one policy per expanded level, in entry order then
    level order.  The entry tenant is the principal's tenant; the spec's own
    tenant field scopes the permission.
    """
    pt = policy_type if policy_type is not None else tapis_files_policy_type()
    policies: list[Policy] = []
    for i, (username, tenant, raw) in enumerate(entries):
        try:
            spec = parse_perm_spec(raw)
        except MalformedPermSpec as exc:
            raise MalformedPermSpec(f"entry {i}: {exc}") from None
        for level in spec.levels:
            policies.append(
                Policy(
                    pt,
                    (tenant, username, spec.tenant, spec.system_id, level, spec.path),
                    decision,
                )
            )
    return PolicySet(pt, tuple(policies))


def read_perms_file(
    text: str, default_username: str | None = None
) -> list[tuple[str, str]]:
    """Parse a ``.perms`` document into (username, raw-spec) pairs.

    Each line is a perm spec, optionally preceded by a username and
    whitespace.  Blank lines and ``#`` comments are ignored.  Lines without a
    username use ``default_username``; if that is None such a line is an
    error.  Raises MalformedPermSpec tagged with the 1-based line number.
    """
    out: list[tuple[str, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split(None, 1)
        if len(fields) == 2 and not fields[0].startswith("files:"):
            username, raw = fields
        else:
            if default_username is None:
                raise MalformedPermSpec(
                    f"line {lineno}: no username on the line and no default given"
                )
            username, raw = default_username, stripped
        try:
            parse_perm_spec(raw)
        except MalformedPermSpec as exc:
            raise MalformedPermSpec(f"line {lineno}: {exc}") from None
        out.append((username, raw))
    return out


def registry_from_config(config: Mapping) -> dict[str, PolicyType]:
    """Builtin policy types instantiated for one deployment's enumerations.

    ``config`` maps ``tenants`` and ``services`` to value lists; both are
    optional and default to the module defaults.
    """
    tenants = tuple(config.get("tenants", DEFAULT_TENANTS))
    services = tuple(config.get("services", DEFAULT_SERVICES))
    return {
        "http_api": http_api_policy_type(tenants, services),
        "tapis_files": tapis_files_policy_type(tenants),
    }


def default_registry() -> dict[str, PolicyType]:
    return registry_from_config({})
