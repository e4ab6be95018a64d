from __future__ import annotations

from typing import Iterable, Optional, Sequence

import pandas as pd

from ppmon.log._schema import format_value

from ._prefix import EncodedPrefix

NOISE = -1


def training_matrix(
    prefixes: Sequence[EncodedPrefix],
    schema: Iterable[str],
    clusters: Optional[Sequence[int]] = None,
) -> pd.DataFrame:
    """One row per encoded prefix, for inspection outside of ppmon.

    Parameters
    ----------
    prefixes : sequence of EncodedPrefix
        The training prefixes.

    schema : iterable of str
        Attribute columns, in order.

    clusters : sequence of int, default=None
        Cluster of every prefix, ``-1`` for noise. If ``None`` the ``cluster``
        column is left empty.

    Returns
    -------
    matrix : pandas.DataFrame
        Columns ``case_id``, ``prefix_length``, ``cluster``, then one column
        per attribute holding the textual value (empty if missing), then
        ``label``.
    """
    schema = list(schema)
    if clusters is not None and len(clusters) != len(prefixes):
        raise ValueError(
            f"Got {len(clusters)} cluster ids for {len(prefixes)} prefixes."
        )

    rows = []
    for i, prefix in enumerate(prefixes):
        values = prefix.features.values
        label = prefix.features.label
        rows.append(
            [
                prefix.case_id,
                prefix.prefix_length,
                "" if clusters is None else int(clusters[i]),
                *(
                    format_value(values[name]) if name in values else ""
                    for name in schema
                ),
                "" if label is None else label.value,
            ]
        )
    columns = ["case_id", "prefix_length", "cluster", *schema, "label"]
    return pd.DataFrame(rows, columns=columns)
