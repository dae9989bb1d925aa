"""numpy implementations of the factor kernels (fallback backend)."""

import numpy as np


def _broadcast_view(table, pos, out_cards):
    """View a flat operand table broadcastable against the result shape."""
    pos = np.asarray(pos, dtype=np.intp)
    cards = [int(out_cards[p]) for p in pos]
    nd = np.asarray(table, dtype=np.float64).reshape(cards)
    # Reorder operand axes to ascending result position, then pad with
    # singleton axes so numpy broadcasting does the index arithmetic.
    order = np.argsort(pos, kind="stable")
    nd = nd.transpose(tuple(order))
    shape = [1] * len(out_cards)
    for p in pos:
        shape[int(p)] = int(out_cards[int(p)])
    return nd.reshape(shape)


def multiply(out_cards, a_table, a_pos, b_table, b_pos):
    out_cards = [int(c) for c in out_cards]
    a = _broadcast_view(a_table, a_pos, out_cards)
    b = _broadcast_view(b_table, b_pos, out_cards)
    return np.ascontiguousarray((a * b).ravel())


def marginalize(table, cards, sum_axes):
    cards = tuple(int(c) for c in cards)
    axes = tuple(int(a) for a in sum_axes)
    nd = np.asarray(table, dtype=np.float64).reshape(cards)
    if axes:
        nd = nd.sum(axis=axes)
    return np.ascontiguousarray(nd.ravel())
