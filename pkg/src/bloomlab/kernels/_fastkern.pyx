# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled factor kernels.

Same contract as ``_pykern``: flat C-ordered tables, ``*_pos`` mapping each
operand axis to its axis in the result scope. The loops walk a single
odometer over the result (or input) shape and keep per-operand flat offsets
incrementally, so no index arrays are materialized. ``marginalize``
additionally collapses the trailing axes that are uniformly kept or
uniformly summed into one contiguous inner run, which keeps the odometer
off the hot path and lets the compiler vectorize the run.
"""

import numpy as np


cdef void _mul_loop(
    const Py_ssize_t[::1] cards,
    const double[::1] a, const Py_ssize_t[::1] sa,
    const double[::1] b, const Py_ssize_t[::1] sb,
    double[::1] out, Py_ssize_t[::1] digit,
) noexcept nogil:
    cdef Py_ssize_t ndim = cards.shape[0]
    cdef Py_ssize_t total = out.shape[0]
    cdef Py_ssize_t i, d
    cdef Py_ssize_t ia = 0, ib = 0
    for i in range(total):
        out[i] = a[ia] * b[ib]
        d = ndim - 1
        while d >= 0:
            digit[d] += 1
            ia += sa[d]
            ib += sb[d]
            if digit[d] < cards[d]:
                break
            digit[d] = 0
            ia -= sa[d] * cards[d]
            ib -= sb[d] * cards[d]
            d -= 1


cdef void _marg_loop(
    const Py_ssize_t[::1] cards,
    const double[::1] table, const Py_ssize_t[::1] so,
    double[::1] out, Py_ssize_t[::1] digit,
    Py_ssize_t run, bint run_kept,
) noexcept nogil:
    # ``cards``/``so``/``digit`` cover only the prefix axes; the trailing
    # axes are folded into contiguous runs of length ``run``.
    cdef Py_ssize_t nprefix = cards.shape[0]
    cdef Py_ssize_t nruns = table.shape[0] // run
    cdef Py_ssize_t r, j, d
    cdef Py_ssize_t i = 0, io = 0
    cdef double acc
    for r in range(nruns):
        if run_kept:
            for j in range(run):
                out[io + j] += table[i + j]
        else:
            acc = 0.0
            for j in range(run):
                acc += table[i + j]
            out[io] += acc
        i += run
        d = nprefix - 1
        while d >= 0:
            digit[d] += 1
            io += so[d]
            if digit[d] < cards[d]:
                break
            digit[d] = 0
            io -= so[d] * cards[d]
            d -= 1


def _scattered_strides(pos, out_cards):
    """Operand C-order strides, placed at the operand's result axes."""
    pos = np.asarray(pos, dtype=np.intp)
    own = np.ones(len(pos), dtype=np.intp)
    for k in range(len(pos) - 2, -1, -1):
        own[k] = own[k + 1] * out_cards[pos[k + 1]]
    strides = np.zeros(len(out_cards), dtype=np.intp)
    strides[pos] = own
    return strides


def multiply(out_cards, a_table, a_pos, b_table, b_pos):
    cards = np.asarray(out_cards, dtype=np.intp)
    a = np.ascontiguousarray(a_table, dtype=np.float64)
    b = np.ascontiguousarray(b_table, dtype=np.float64)
    total = 1
    for c in cards:
        total *= int(c)
    out = np.empty(total, dtype=np.float64)
    digit = np.zeros(len(cards), dtype=np.intp)
    _mul_loop(
        cards, a, _scattered_strides(a_pos, cards),
        b, _scattered_strides(b_pos, cards),
        out, digit,
    )
    return out


def marginalize(table, cards, sum_axes):
    cards = np.asarray(cards, dtype=np.intp)
    t = np.ascontiguousarray(table, dtype=np.float64)
    ndim = len(cards)
    dropped = {int(x) for x in sum_axes}
    kept = [d for d in range(ndim) if d not in dropped]
    so = np.zeros(ndim, dtype=np.intp)
    stride = 1
    for d in reversed(kept):
        so[d] = stride
        stride *= int(cards[d])
    out = np.zeros(stride, dtype=np.float64)
    if ndim == 0:
        out[:] = t
        return out
    # trailing axes of one flavor collapse into a contiguous inner run
    last_summed = (ndim - 1) in dropped
    run = 1
    d = ndim - 1
    while d >= 0 and ((d in dropped) == last_summed):
        run *= int(cards[d])
        d -= 1
    nprefix = d + 1
    digit = np.zeros(nprefix, dtype=np.intp)
    _marg_loop(cards[:nprefix], t, so[:nprefix], out, digit, run, not last_summed)
    return out
