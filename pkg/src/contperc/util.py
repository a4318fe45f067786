"""Small numeric helpers shared across modules."""

from __future__ import annotations

__all__ = ["ipow"]


def ipow(x, n: int):
    """x**n for a small non-negative integer n by repeated multiplication.

    Unlike pow(), repeated multiplication commutes exactly with rescaling x
    by a power of two, which the coupled-seed invariance tests rely on.
    Works elementwise on numpy arrays.
    """
    if n < 0:
        raise ValueError("exponent must be non-negative")
    result = x * 0 + 1.0
    for _ in range(n):
        result = result * x
    return result
