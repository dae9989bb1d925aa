"""Factor-algebra kernels with a compiled fast path.

Two interchangeable backends implement the same flat-table operations:

``_fastkern``
    Cython extension, built at install time when a compiler is available.
``_pykern``
    numpy fallback, always present.

The compiled backend is selected at import when available; set the
environment variable ``BLOOMLAB_PURE_PYTHON=1`` to force the fallback.
``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import _pykern

_BACKENDS = {"python": _pykern}

try:
    from . import _fastkern  # type: ignore[attr-defined]

    _BACKENDS["compiled"] = _fastkern
except ImportError:  # pragma: no cover - depends on build environment
    _fastkern = None

if os.environ.get("BLOOMLAB_PURE_PYTHON"):
    _active = _BACKENDS["python"]
else:
    _active = _BACKENDS.get("compiled", _BACKENDS["python"])


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    for name, mod in _BACKENDS.items():
        if mod is _active:
            return name
    raise RuntimeError("active backend not registered")


def set_backend(name):
    """Switch the active backend; returns the previous backend name."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available_backends()}")
    previous = backend_name()
    _active = _BACKENDS[name]
    return previous


def multiply(out_cards, a_table, a_pos, b_table, b_pos):
    """Pointwise product of two factors laid out on a shared scope.

    ``out_cards`` are the cardinalities of the result scope; ``a_pos`` /
    ``b_pos`` map each operand axis (in operand order) to its axis in the
    result. Tables are flat, C-ordered over their own scope.
    """
    return _active.multiply(out_cards, a_table, a_pos, b_table, b_pos)


def marginalize(table, cards, sum_axes):
    """Sum out ``sum_axes`` (sorted, ascending) from a flat C-ordered table."""
    return _active.marginalize(table, cards, sum_axes)
