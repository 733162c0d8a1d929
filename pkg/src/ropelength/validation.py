"""Input checks shared by the estimators and the command line."""

from __future__ import annotations

import numpy as np

from .energy import check_exponent
from .exceptions import DomainError
from .knot import PolyKnot


def check_curve(K) -> PolyKnot:
    """Accept a :class:`PolyKnot` or anything array-like of shape ``(n, 3)``."""
    if isinstance(K, PolyKnot):
        return K
    return PolyKnot(K)


def check_curves(curves) -> list[PolyKnot]:
    """A batch of curves: a list of curves or a 3-d array ``(n_curves, n, 3)``."""
    if isinstance(curves, PolyKnot):
        return [curves]
    if isinstance(curves, np.ndarray) and curves.ndim == 2:
        return [check_curve(curves)]
    out = [check_curve(c) for c in curves]
    if not out:
        raise DomainError("need at least one curve")
    return out


def check_exponents(ps) -> tuple[float, ...]:
    if np.isscalar(ps):
        ps = [ps]
    out = tuple(check_exponent(p) for p in ps)
    if not out:
        raise DomainError("need at least one exponent")
    return out


def parse_exponent_list(text: str) -> tuple[float, ...]:
    """``"2,16,256"`` -> ``(2.0, 16.0, 256.0)``."""
    try:
        return check_exponents([float(t) for t in text.split(",") if t.strip()])
    except ValueError as exc:
        raise DomainError(f"bad exponent list {text!r}: {exc}") from None


def parse_schedule(text: str) -> tuple[int, int]:
    """``"lo:hi"`` with both bounds powers of two."""
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise DomainError(f"schedule must look like lo:hi, got {text!r}") from None
    return lo, hi
