import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from policheck import (
    CharSet,
    MatchingStrategy,
    Policy,
    PolicySet,
    PolicyType,
    StringComponentDef,
    StringEnumComponentDef,
)

settings.register_profile("ci", derandomize=True, max_examples=60, deadline=None)
settings.load_profile("ci")

SOLVER_DIR = Path(__file__).parent / "solvers"

ALNUM = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"

_W = MatchingStrategy.WILDCARD


@pytest.fixture(scope="session")
def path_only_type() -> PolicyType:
    """One string component named path; the shape of the first cliff case."""
    return PolicyType(
        "path_only",
        (StringComponentDef("path", CharSet.from_string(ALNUM + "/.*"), 255, _W),),
    )


@pytest.fixture(scope="session")
def cliff1(path_only_type):
    """P = allow /sys1*; Q = allow /*.  P implies Q."""
    p = PolicySet(path_only_type, (Policy(path_only_type, ("/sys1*",), "allow"),))
    q = PolicySet(path_only_type, (Policy(path_only_type, ("/*",), "allow"),))
    return p, q


@pytest.fixture(scope="session")
def upa_type() -> PolicyType:
    """(user, path, action): the shape of the second cliff case."""
    return PolicyType(
        "user_path_action",
        (
            StringComponentDef("user", CharSet.from_string(ALNUM), 64, _W),
            StringComponentDef("path", CharSet.from_string(ALNUM + "/.*"), 255, _W),
            StringEnumComponentDef("action", ("GET", "POST", "PUT", "DELETE"), _W),
        ),
    )


@pytest.fixture(scope="session")
def cliff2(upa_type):
    """Three-policy P (one allow, two denies) vs two-policy Q.  Q implies P."""
    pt = upa_type
    p = PolicySet(
        pt,
        (
            Policy(pt, ("jstubbs", "s2/home/jstubbs/*", "*"), "allow"),
            Policy(pt, ("jstubbs", "s2/*", "PUT"), "deny"),
            Policy(pt, ("jstubbs", "s2/*", "POST"), "deny"),
        ),
    )
    q = PolicySet(
        pt,
        (
            Policy(pt, ("jstubbs", "s2/home/jstubbs/a.out", "GET"), "allow"),
            Policy(pt, ("jstubbs", "s2/home/jstubbs/b.out", "GET"), "allow"),
        ),
    )
    return p, q


def solver_cmd(name: str) -> tuple[str, tuple[str, ...]]:
    """(executable, args) pair invoking one of the bundled test solvers."""
    return sys.executable, (str(SOLVER_DIR / name),)
