from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterator, Literal, Union

from ._forest import RandomForest
from ._tree import DecisionTree, Leaf, Node, walk_leaves


@dataclass
class NodeInfo:
    """Information pertinent for visualization, extracted from tree nodes.

    The visualization function only receives ``NodeInfo`` instances and does
    not have to know how to discover children or evaluate the reliability
    gate.
    """

    level: int
    key: str  # the branch condition leading to the node
    val: str  # the description of the node
    is_self_reliable: bool  # whether this node passes the gate
    is_reliable: bool  # whether this node and every leaf below it pass the gate
    is_last: bool  # whether this is the last child of the parent node


def _check_visibility(
    is_self_reliable: bool,
    is_reliable: bool,
    show: Literal["all", "unreliable", "reliable"],
) -> bool:
    if show == "all":
        return True

    if show == "unreliable":
        return not is_reliable

    return is_self_reliable


def _get_node_label(
    node: NodeInfo,
    tag_reliable: str = "",
    tag_unreliable: str = "(unreliable)",
    use_colors: bool = True,
    color_reliable: str = "green",
    color_unreliable: str = "red",
    color_child_unreliable: str = "yellow",
) -> str:
    """Label a node according to the reliability gate."""
    node_val = node.val
    tag = tag_reliable if node.is_self_reliable else tag_unreliable
    if tag:
        node_val += f" {tag}"

    if use_colors:
        try:
            from rich.markup import escape
        except ImportError:
            return node_val

        if node.is_reliable:
            color = color_reliable
        elif node.is_self_reliable:
            color = color_child_unreliable
        else:
            color = color_unreliable
        node_val = f"[{color}]{escape(node_val)}"

    return node_val


def pretty_print_tree(
    nodes_iter: Iterator[NodeInfo],
    show: Literal["all", "unreliable", "reliable"],
    **kwargs: Any,
) -> None:
    """Print flattened nodes as an indented tree, colored if rich is installed."""
    print_ = print
    if kwargs.get("use_colors", True):
        try:
            import rich

            print_ = rich.print  # type: ignore
        except ImportError:
            pass

    node = next(nodes_iter)
    label = _get_node_label(node, **kwargs)
    print_(f"{node.key}: {label}")
    prev_level = node.level
    prefix = ""

    for node in nodes_iter:
        if not _check_visibility(node.is_self_reliable, node.is_reliable, show=show):
            continue

        level_diff = prev_level - node.level
        if level_diff < -1:
            raise ValueError(
                f"Encountered a level difference of {level_diff} while walking "
                "the tree, nodes must be visited depth first."
            )

        # a child of the previous node keeps the prefix, a sibling or an
        # ancestor's sibling drops one segment per level climbed
        for _ in range(level_diff + 1):
            prefix = prefix[:-4]

        connector = "└──" if node.is_last else "├──"
        label = _get_node_label(node, **kwargs)
        print_(f"{prefix}{connector} {node.key}: {label}")
        prefix += "    " if node.is_last else "│   "

        prev_level = node.level


def _describe(node: Node) -> str:
    if isinstance(node, Leaf):
        if not node.total:
            return (
                f"{node.label} (no training rows, "
                f"probability {node.probability:.2f})"
            )
        return (
            f"{node.label} (support {node.support}/{node.total}, "
            f"probability {node.probability:.2f})"
        )
    compliant, non_compliant = node.counts
    return (
        f"split on {node.attribute} ({compliant} compliant, "
        f"{non_compliant} non_compliant)"
    )


def walk_tree(
    node: Node,
    min_support: int = 0,
    min_probability: float = 0.0,
    node_name: str = "root",
    level: int = 0,
    is_last: bool = False,
) -> Iterator[NodeInfo]:
    """Visit all nodes depth first and yield their :class:`NodeInfo`.

    A leaf is reliable if its support and probability reach the given
    thresholds; a split node is reliable if all leaves below it are.
    """

    def gate(leaf: Leaf) -> bool:
        return leaf.support >= min_support and leaf.probability >= min_probability

    is_leaf = isinstance(node, Leaf)
    yield NodeInfo(
        level=level,
        key=node_name,
        val=_describe(node),
        is_self_reliable=gate(node) if is_leaf else True,
        is_reliable=all(gate(leaf) for leaf in walk_leaves(node)),
        is_last=is_last,
    )
    if is_leaf:
        return

    children = list(node.children())
    for i, (key, child) in enumerate(children, start=1):
        yield from walk_tree(
            child,
            min_support=min_support,
            min_probability=min_probability,
            node_name=key,
            level=level + 1,
            is_last=i == len(children),
        )


def _walk_model(
    model: Union[DecisionTree, RandomForest], min_support: int, min_probability: float
) -> Iterator[NodeInfo]:
    if isinstance(model, DecisionTree):
        yield from walk_tree(model.root_, min_support, min_probability)
        return

    trees = model.trees_
    is_reliable = all(
        leaf.support >= min_support and leaf.probability >= min_probability
        for tree in trees
        for leaf in walk_leaves(tree.root_)
    )
    yield NodeInfo(0, "forest", f"{len(trees)} trees", True, is_reliable, False)
    for i, tree in enumerate(trees, start=1):
        yield from walk_tree(
            tree.root_,
            min_support,
            min_probability,
            node_name=f"tree {i}",
            level=1,
            is_last=i == len(trees),
        )


def render_tree(
    model: Union[DecisionTree, RandomForest],
    *,
    min_support: int = 0,
    min_probability: float = 0.0,
    show: Literal["all", "unreliable", "reliable"] = "all",
    sink: Callable[..., None] = pretty_print_tree,
    **kwargs: Any,
) -> None:
    """Show a fitted tree, or all trees of a forest, as a tree view.

    Leaves whose support or probability fall below ``min_support`` and
    ``min_probability`` are tagged as unreliable, which is how the runtime
    reliability gate would treat a prediction from them.

    Parameters
    ----------
    model : DecisionTree or RandomForest
        A fitted classifier.

    min_support : int, default=0
        Support threshold of the gate.

    min_probability : float, default=0.0
        Probability threshold of the gate.

    show : "all" or "unreliable" or "reliable", default="all"
        Whether to print all nodes, only nodes with unreliable leaves below
        them, or only reliable nodes.

    sink : function, default=:func:`pretty_print_tree`
        Takes an iterator of :class:`NodeInfo` and ``show``. Any additional
        ``kwargs`` are passed on; the default sink accepts ``tag_reliable``,
        ``tag_unreliable``, ``use_colors``, ``color_reliable``,
        ``color_unreliable`` and ``color_child_unreliable``.
    """
    sink(_walk_model(model, min_support, min_probability), show, **kwargs)
