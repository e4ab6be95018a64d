from __future__ import annotations

import io
from typing import Any, Sequence

import numpy as np

from ._audit import Node
from ._protocol import PROTOCOL
from ._trusted_types import NUMPY_TYPE_NAMES
from ._utils import LoadContext, SaveContext, header, import_type
from .exceptions import UnsupportedTypeException


def ndarray_get_state(obj: Any, save_context: SaveContext) -> dict[str, Any]:
    """Store an array, or a numpy scalar as a 0-d array, in its own member."""
    if obj.dtype == object:
        raise UnsupportedTypeException(obj)

    buffer = io.BytesIO()
    np.save(buffer, obj, allow_pickle=False)
    # members are numbered in traversal order, a shared array is stored once
    member = f"{save_context.memoize(obj)}.npy"
    save_context.write_member(member, buffer.getbuffer())
    return {**header(type(obj), "NdArrayNode"), "file": member}


class NdArrayNode(Node):
    default_trusted = NUMPY_TYPE_NAMES

    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
    ) -> None:
        super().__init__(state, load_context, trusted)
        self.file = state["file"]
        self.children = {"content": io.BytesIO(load_context.src.read(self.file))}

    def _construct(self):
        array = np.load(self.children["content"], allow_pickle=False)
        if self.type_name == "numpy.ndarray":
            return array
        return import_type(self.module_name, self.class_name)(array)


GET_STATE_DISPATCH_FUNCTIONS = [
    (np.generic, ndarray_get_state),
    (np.ndarray, ndarray_get_state),
]

NODE_TYPE_MAPPING = {
    ("NdArrayNode", PROTOCOL): NdArrayNode,
}
