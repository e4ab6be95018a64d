from __future__ import annotations

import io
from typing import Any, Dict, Iterator, List, Literal, Optional, Sequence, Type, Union

from ._protocol import PROTOCOL
from ._utils import LoadContext, TypeLike, type_paths
from .exceptions import UntrustedTypesFoundException

NODE_TYPE_MAPPING: dict[tuple[str, int], Type[Node]] = {}
VALID_NODE_CHILD_TYPES = Optional[
    Union["Node", List["Node"], Dict[str, "Node"], str, io.BytesIO]
]

_UNBUILT = object()


def audit_tree(tree: Node) -> None:
    """Refuse a tree naming a type that is not trusted.

    Raises
    ------
    UntrustedTypesFoundException
        If the tree contains an untrusted type.
    """
    if tree.trusted is True:
        return
    unsafe = tree.get_unsafe_set()
    if unsafe:
        raise UntrustedTypesFoundException(unsafe)


class Node:
    """One saved object of a model file, not built yet.

    ``__init__`` turns the saved state into child nodes without importing
    anything, so a whole model can be audited before any of its classes is
    touched. :meth:`construct` then builds the object once.

    Parameters
    ----------
    state : dict
        The saved state of the object.

    load_context : LoadContext
        The context of the load.

    trusted : bool or list of str, default=False
        ``True`` loads any type. Otherwise the node trusts its
        ``default_trusted`` types plus the ones listed.

    memoize : bool, default=True
        Whether later references to the same saved number resolve to this node.
    """

    default_trusted: Sequence[TypeLike] = ()

    def __init__(
        self,
        state: dict[str, Any],
        load_context: LoadContext,
        trusted: bool | Sequence[str] = False,
        memoize: bool = True,
    ) -> None:
        self.class_name = state["__class__"]
        self.module_name = state["__module__"]
        self.trusted = self._get_trusted(trusted, self.default_trusted)
        self.children: dict[str, VALID_NODE_CHILD_TYPES] = {}
        self._built: Any = _UNBUILT
        number = state.get("__id__")
        if number and memoize:
            load_context.memoize(self, number)

    @property
    def type_name(self) -> str:
        return f"{self.module_name}.{self.class_name}"

    def construct(self) -> Any:
        if self._built is _UNBUILT:
            self._built = self._construct()
        return self._built

    def _construct(self) -> Any:
        raise NotImplementedError(
            f"{self.__class__.__name__} should implement a '_construct' method"
        )

    @staticmethod
    def _get_trusted(
        trusted: bool | Sequence[TypeLike], default: Sequence[TypeLike]
    ) -> Literal[True] | list[str]:
        if trusted is True:
            return True
        extra = [] if trusted is False else type_paths(list(trusted))
        return extra + type_paths(list(default))

    def is_self_safe(self) -> bool:
        """Whether this node's own type is trusted, ignoring its children."""
        return self.trusted is True or self.type_name in self.trusted

    def child_nodes(self) -> Iterator[Node]:
        for child in self.children.values():
            if isinstance(child, Node):
                yield child
            elif isinstance(child, list):
                yield from child
            elif isinstance(child, dict):
                yield from child.values()
            elif child is not None and not isinstance(child, (str, io.BytesIO)):
                raise ValueError(f"Cannot determine the safety of type {type(child)}.")

    def get_unsafe_set(self) -> set[str]:
        """Untrusted types of this node and of every node below it."""
        unsafe: set[str] = set()
        # shared objects make the tree a graph, every node is checked once
        seen: set[int] = set()
        stack: list[Node] = [self]
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if not node.is_self_safe():
                unsafe.add(node.type_name)
            stack.extend(node.child_nodes())
        return unsafe


def get_tree(
    state: dict[str, Any],
    load_context: LoadContext,
    trusted: bool | Sequence[str],
) -> Node:
    """Turn a saved state into a tree of nodes without building anything.

    A state whose number was seen before resolves to the node already made
    for it. Loaders registered for the file's protocol win; any other loader
    is looked up under the current protocol.

    Parameters
    ----------
    state : dict
        The saved state.

    load_context : LoadContext
        The context of the load.

    trusted : bool, or list of str
        See :class:`Node`.
    """
    number = state.get("__id__")
    if number in load_context.memo:
        return load_context.get_object(number)

    loader: str = state["__loader__"]
    node_cls = NODE_TYPE_MAPPING.get((loader, load_context.protocol))
    if node_cls is None:
        node_cls = NODE_TYPE_MAPPING.get((loader, PROTOCOL))
    if node_cls is None:
        type_name = f"{state['__module__']}.{state['__class__']}"
        raise TypeError(
            f"Can't find loader {loader} for type {type_name} and "
            f"protocol {load_context.protocol}."
        )
    return node_cls(state, load_context, trusted=trusted)
