from __future__ import annotations

from typing import Hashable, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed


def edit_distance(a: Sequence[Hashable], b: Sequence[Hashable]) -> int:
    """Levenshtein distance with unit insertion, deletion and substitution."""
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, x in enumerate(a, start=1):
        current = [i]
        for j, y in enumerate(b, start=1):
            current.append(
                min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (x != y))
            )
        previous = current
    return previous[-1]


def edit_distance_normalized(a: Sequence[Hashable], b: Sequence[Hashable]) -> float:
    """Levenshtein distance divided by the length of the longer sequence.

    The result lies in ``[0, 1]``; two empty sequences are at distance 0.

    Examples
    --------
    >>> edit_distance_normalized("ABCD", "ABC")
    0.25
    >>> edit_distance_normalized([], ["A", "B"])
    1.0
    """
    longest = max(len(a), len(b))
    if not longest:
        return 0.0
    return edit_distance(a, b) / longest


class SequenceCodes:
    """Sequences of labels as a padded integer matrix.

    Labels are coded by order of first appearance; the padding value never
    matches a code.
    """

    PAD = -1

    def __init__(self, sequences: Sequence[Sequence[Hashable]]) -> None:
        self.vocabulary: dict = {}
        self.lengths = np.array([len(s) for s in sequences], dtype=np.int64)
        width = int(self.lengths.max()) if len(sequences) else 0
        self.codes = np.full((len(sequences), width), self.PAD, dtype=np.int64)
        for row, sequence in enumerate(sequences):
            self.codes[row, : len(sequence)] = self.encode(sequence)

    def encode(self, sequence: Sequence[Hashable]) -> List[int]:
        return [
            self.vocabulary.setdefault(label, len(self.vocabulary))
            for label in sequence
        ]

    def lookup(self, sequence: Sequence[Hashable]) -> List[int]:
        # labels outside of the vocabulary match nothing
        return [self.vocabulary.get(label, -2) for label in sequence]


def _raw_distances(query: Sequence[int], codes: np.ndarray, lengths: np.ndarray):
    # one dynamic programming row per query symbol, computed for all
    # candidates at once; within a row, D[i, j] = min over k <= j of
    # (x[k] + j - k), which is a running minimum
    n_candidates, width = codes.shape
    steps = np.arange(width + 1)
    row = np.broadcast_to(steps, (n_candidates, width + 1)).copy()
    for i, symbol in enumerate(query, start=1):
        best = np.empty_like(row)
        best[:, 0] = i
        best[:, 1:] = np.minimum(row[:, 1:] + 1, row[:, :-1] + (codes != symbol))
        row = steps + np.minimum.accumulate(best - steps, axis=1)
    return row[np.arange(n_candidates), lengths]


def _normalize(raw: np.ndarray, query_length: int, lengths: np.ndarray) -> np.ndarray:
    longest = np.maximum(lengths, query_length)
    return np.divide(
        raw, longest, out=np.zeros(len(raw), dtype=np.float64), where=longest > 0
    )


def edit_distances_to(
    query: Sequence[Hashable],
    candidates: Sequence[Sequence[Hashable]] | SequenceCodes,
) -> np.ndarray:
    """Normalized edit distance from ``query`` to every candidate.

    Pass a :class:`SequenceCodes` to reuse the encoding of the candidates
    across queries.
    """
    if not isinstance(candidates, SequenceCodes):
        candidates = SequenceCodes(candidates)
    if not len(candidates.lengths):
        return np.zeros(0)
    raw = _raw_distances(candidates.lookup(query), candidates.codes, candidates.lengths)
    return _normalize(raw, len(query), candidates.lengths)


def _upper_rows(codes: SequenceCodes, rows: range) -> List[Tuple[int, np.ndarray]]:
    result = []
    for row in rows:
        query = codes.codes[row, : codes.lengths[row]]
        raw = _raw_distances(
            query, codes.codes[row + 1 :], codes.lengths[row + 1 :]
        )
        result.append(
            (row, _normalize(raw, int(codes.lengths[row]), codes.lengths[row + 1 :]))
        )
    return result


def pairwise_edit_distances(
    sequences: Sequence[Sequence[Hashable]], n_jobs: Optional[int] = None
) -> np.ndarray:
    """Symmetric matrix of normalized edit distances.

    Parameters
    ----------
    sequences : sequence of sequences
        Sequences of hashable labels.

    n_jobs : int, default=None
        Number of threads computing rows, as understood by
        :class:`joblib.Parallel`.

    Returns
    -------
    distances : numpy.ndarray of shape (n, n)
    """
    n = len(sequences)
    distances = np.zeros((n, n), dtype=np.float64)
    if n < 2:
        return distances

    codes = SequenceCodes(sequences)
    # interleave rows so that every chunk gets long and short ones
    n_chunks = max(1, min(n - 1, 64))
    chunks = [range(start, n - 1, n_chunks) for start in range(n_chunks)]
    results = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_upper_rows)(codes, chunk) for chunk in chunks
    )
    for chunk in results:
        for row, values in chunk:
            distances[row, row + 1 :] = values
    return np.maximum(distances, distances.T)
