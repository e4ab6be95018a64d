from __future__ import annotations

from typing import Any

import numpy as np

from ppmon import cluster, encoding, log, ltl, tree

from ._utils import type_path

PRIMITIVE_TYPES = [int, float, str, bool]

PRIMITIVE_TYPE_NAMES = ["builtins." + t.__name__ for t in PRIMITIVE_TYPES]

NUMPY_TYPE_NAMES = [
    type_path(t)
    for t in (np.ndarray, np.float64, np.float32, np.int64, np.int32, np.bool_)
]

# the public classes of the subpackages, which only hold data and never run
# code on construction
PPMON_TYPE_NAMES = sorted(
    type_path(obj)
    for package in (log, ltl, encoding, cluster, tree)
    for obj in (getattr(package, name) for name in package.__all__)
    if isinstance(obj, type) and obj.__module__.startswith("ppmon.")
)


def trust_types(*types: Any) -> None:
    """Add ``types`` to the types loaded without passing ``trusted``.

    Packages building on top of the persistence format call this for the
    classes they save.
    """
    for name in map(type_path, types):
        if name not in PPMON_TYPE_NAMES:
            PPMON_TYPE_NAMES.append(name)
