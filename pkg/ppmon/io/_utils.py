"""Helpers shared by the state writers and the node loaders of model files."""

from __future__ import annotations

import importlib
from dataclasses import dataclass, field
from functools import singledispatch
from typing import Any, Union
from zipfile import ZipFile, ZipInfo

from ._protocol import PROTOCOL

# members carry a fixed timestamp so equal models give equal archives
MEMBER_DATE_TIME = (1980, 1, 1, 0, 0, 0)

TypeLike = Union[str, type]


def module_of(obj: Any) -> str:
    """Name of the module defining ``obj``, ``"__main__"`` when unknown."""
    return getattr(obj, "__module__", None) or "__main__"


def type_path(t: type) -> str:
    """Dotted path a type is saved and trusted under, e.g. ``"builtins.list"``.

    >>> type_path(dict)
    'builtins.dict'
    """
    return f"{module_of(t)}.{t.__name__}"


def type_paths(types: TypeLike | list[TypeLike] | tuple | None) -> list[str]:
    """Dotted paths of a type, a path, or a sequence mixing both.

    >>> type_paths([int, "numpy.ndarray"])
    ['builtins.int', 'numpy.ndarray']
    """
    if not types:
        return []
    if isinstance(types, (str, type)):
        types = [types]
    return [t if isinstance(t, str) else type_path(t) for t in types]


def import_type(module: str, name: str) -> Any:
    """Import the class or function ``name`` from ``module``."""
    if not (module and name):
        raise ValueError(f"Object {name} of module {module} is unknown")
    return getattr(importlib.import_module(module), name)


def header(obj_type: type, loader: str) -> dict[str, Any]:
    """Keys opening every saved state: the saved type and the node loading it."""
    return {
        "__class__": obj_type.__name__,
        "__module__": module_of(obj_type),
        "__loader__": loader,
    }


@dataclass(frozen=True)
class SaveContext:
    """State of one save, passed to every ``*_get_state`` function.

    Objects are numbered in the order they are first met, which makes the
    numbering, and the names of the array members, identical between saves of
    equal models.

    Parameters
    ----------
    zip_file: zipfile.ZipFile
        The archive being written, open in write mode.

    protocol: int
        The protocol the archive is written with.
    """

    zip_file: ZipFile
    protocol: int = PROTOCOL
    numbers: dict[int, tuple[int, Any]] = field(default_factory=dict)

    def memoize(self, obj: Any) -> int:
        # the object is held until the save ends, so its id is not reused
        key = id(obj)
        if key not in self.numbers:
            self.numbers[key] = (len(self.numbers) + 1, obj)
        return self.numbers[key][0]

    def write_member(self, name: str, data: bytes | memoryview | str) -> None:
        if name in self.zip_file.namelist():
            return
        info = ZipInfo(name, date_time=MEMBER_DATE_TIME)
        info.compress_type = self.zip_file.compression
        self.zip_file.writestr(info, data)

    def clear_memo(self) -> None:
        self.numbers.clear()


@dataclass(frozen=True)
class LoadContext:
    """State of one load: the archive and the nodes built so far by number.

    Parameters
    ----------
    src: zipfile.ZipFile
        The archive being read.

    protocol: int
        The protocol the archive was written with.
    """

    src: ZipFile
    protocol: int
    memo: dict[int, Any] = field(default_factory=dict)

    def memoize(self, node: Any, number: int) -> None:
        self.memo[number] = node

    def get_object(self, number: int) -> Any:
        return self.memo.get(number)


@singledispatch
def _get_state(obj: Any, save_context: SaveContext) -> dict[str, Any]:
    # registered per type by ppmon.io._persist, never called for a bare object
    raise TypeError(f"Getting the state of type {type(obj)} is not supported yet")


def get_state(value: Any, save_context: SaveContext) -> dict[str, Any]:
    number = save_context.memoize(value)
    state = _get_state(value, save_context)
    state["__id__"] = number
    return state
