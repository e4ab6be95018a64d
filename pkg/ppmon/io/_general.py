from __future__ import annotations

import enum
import json
from typing import Any, Sequence

from ._audit import Node, get_tree
from ._protocol import PROTOCOL
from ._trusted_types import PPMON_TYPE_NAMES, PRIMITIVE_TYPE_NAMES
from ._utils import LoadContext, SaveContext, get_state, header, import_type
from .exceptions import UnsupportedTypeException

JSON_TYPES = (str, int, float, bool)


def dict_get_state(obj: Any, save_context: SaveContext) -> dict[str, Any]:
    for key in obj:
        if isinstance(key, enum.Enum) or type(key) not in JSON_TYPES:
            raise UnsupportedTypeException(key)
    return {
        **header(type(obj), "DictNode"),
        # json keys are strings, the original key types are stored alongside
        "key_types": get_state([type(key) for key in obj], save_context),
        "content": {key: get_state(value, save_context) for key, value in obj.items()},
    }


class DictNode(Node):
    default_trusted = [dict]

    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
    ) -> None:
        super().__init__(state, load_context, trusted)
        self.children = {
            "key_types": get_tree(state["key_types"], load_context, trusted=trusted),
            "content": {
                key: get_tree(value, load_context, trusted=trusted)
                for key, value in state["content"].items()
            },
        }

    def _construct(self):
        content = import_type(self.module_name, self.class_name)()
        key_types = self.children["key_types"].construct()
        for key_type, (key, node) in zip(key_types, self.children["content"].items()):
            # bool("false") is True
            key = json.loads(key) if key_type is bool else key_type(key)
            content[key] = node.construct()
        return content


def sequence_get_state(obj: Any, save_context: SaveContext) -> dict[str, Any]:
    loader = "TupleNode" if isinstance(obj, tuple) else "ListNode"
    return {
        **header(type(obj), loader),
        "content": [get_state(value, save_context) for value in obj],
    }


class _SequenceNode(Node):
    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
    ) -> None:
        super().__init__(state, load_context, trusted)
        self.children = {
            "content": [
                get_tree(value, load_context, trusted=trusted)
                for value in state["content"]
            ]
        }

    def _items(self) -> list[Any]:
        return [item.construct() for item in self.children["content"]]


class ListNode(_SequenceNode):
    default_trusted = [list]

    def _construct(self):
        return import_type(self.module_name, self.class_name)(self._items())


class TupleNode(_SequenceNode):
    default_trusted = [tuple]

    def _construct(self):
        cls = import_type(self.module_name, self.class_name)
        if cls is tuple:
            return tuple(self._items())
        # named tuples take their fields as arguments
        return cls(*self._items())


def type_get_state(obj: type, save_context: SaveContext) -> dict[str, Any]:
    return header(obj, "TypeNode")


class TypeNode(Node):
    default_trusted = PRIMITIVE_TYPE_NAMES

    def _construct(self):
        return import_type(self.module_name, self.class_name)


def enum_get_state(obj: enum.Enum, save_context: SaveContext) -> dict[str, Any]:
    return {**header(type(obj), "EnumNode"), "content": json.dumps(obj.value)}


class EnumNode(Node):
    """A member of an enumeration such as an attribute type, stored by value."""

    default_trusted = PPMON_TYPE_NAMES

    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
    ) -> None:
        super().__init__(state, load_context, trusted)
        self.content = state["content"]

    def _construct(self):
        cls = import_type(self.module_name, self.class_name)
        return cls(json.loads(self.content))


def _attributes(obj: Any) -> dict[str, Any] | None:
    try:
        attrs = obj.__getstate__() if hasattr(obj, "__getstate__") else vars(obj)
    except TypeError:
        return None
    return attrs if isinstance(attrs, dict) else None


def object_get_state(obj: Any, save_context: SaveContext) -> dict[str, Any]:
    if obj is None or type(obj) in JSON_TYPES:
        return {
            "__class__": "str",
            "__module__": "builtins",
            "__loader__": "JsonNode",
            "content": json.dumps(obj),
            "is_json": True,
        }

    attrs = _attributes(obj)
    # objects keeping their state outside a dict, like datetime, are refused
    if attrs is None:
        raise UnsupportedTypeException(obj)
    return {
        **header(type(obj), "ObjectNode"),
        "content": get_state(attrs, save_context),
    }


class ObjectNode(Node):
    """A plain object, such as a tree node or a trained model, rebuilt from its
    attributes without calling ``__init__``."""

    default_trusted = PPMON_TYPE_NAMES

    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
    ) -> None:
        super().__init__(state, load_context, trusted)
        content = state.get("content")
        attrs = None
        if content is not None:
            attrs = get_tree(content, load_context, trusted=trusted)
        self.children = {"attrs": attrs}

    def _construct(self):
        cls = import_type(self.module_name, self.class_name)
        instance = cls.__new__(cls)
        if self.children["attrs"] is None:
            return instance

        attrs = self.children["attrs"].construct()
        if hasattr(instance, "__setstate__"):
            instance.__setstate__(attrs)
        else:
            # frozen dataclasses included
            instance.__dict__.update(attrs)
        return instance


class JsonNode(Node):
    """``None``, a string, a number or a boolean, stored as json."""

    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
    ) -> None:
        super().__init__(state, load_context, trusted)
        self.content = state["content"]

    def is_self_safe(self) -> bool:
        return True

    def _construct(self):
        return json.loads(self.content)


GET_STATE_DISPATCH_FUNCTIONS = [
    (dict, dict_get_state),
    (list, sequence_get_state),
    (tuple, sequence_get_state),
    (type, type_get_state),
    (enum.Enum, enum_get_state),
    (object, object_get_state),
]

NODE_TYPE_MAPPING = {
    ("DictNode", PROTOCOL): DictNode,
    ("ListNode", PROTOCOL): ListNode,
    ("TupleNode", PROTOCOL): TupleNode,
    ("TypeNode", PROTOCOL): TypeNode,
    ("EnumNode", PROTOCOL): EnumNode,
    ("ObjectNode", PROTOCOL): ObjectNode,
    ("JsonNode", PROTOCOL): JsonNode,
}
