"""Resource caps for enumeration-heavy operations.

Caps make every potentially explosive search fail fast with a
ResourceCapError instead of hanging.  Defaults suit desk-scale runs; the
HDX_CAPS environment variable overrides them with a comma-separated list
of ``name=value`` pairs, e.g. ``HDX_CAPS=group_order=200000,bruteforce=65536``.
"""

import os
from dataclasses import dataclass, replace

_ENV_VAR = "HDX_CAPS"


@dataclass(frozen=True)
class Caps:
    group_order: int = 1_000_000      # matrix-group BFS closure
    subspaces: int = 200_000          # subspace enumeration per ambient space
    bruteforce: int = 2**24           # cochain configurations per exhaustive sweep
    subgroup: int = 2**20             # enumerated cocycle/coboundary subgroup size
    solver_faces: int = 50_000        # total faces fed to the integer cone solver
    spectral_dense: int = 3_000       # dense eigensolver matrix size
    iso_vertices: int = 5_000         # isomorphism search size
    field_order: int = 4096           # largest finite field order

    def check(self, name, value, what=""):
        limit = getattr(self, name)
        if value > limit:
            from .errors import ResourceCapError

            raise ResourceCapError(
                f"cap '{name}' exceeded: {what or name} needs {value} > {limit} "
                f"(override via {_ENV_VAR})",
                partial=value,
            )


def _parse_env(text):
    updates = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, _, value = item.partition("=")
        name = name.strip()
        if name not in Caps.__dataclass_fields__:
            raise ValueError(f"unknown cap {name!r} in {_ENV_VAR}")
        updates[name] = int(value)
    return updates


def default_caps():
    """Caps with HDX_CAPS overrides applied."""
    caps = Caps()
    text = os.environ.get(_ENV_VAR)
    if text:
        caps = replace(caps, **_parse_env(text))
    return caps
