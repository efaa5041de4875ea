"""Adaptive Gauss-Kronrod quadrature for semi-infinite integrals.

All integrands are vectorised: they receive a 1-D array of abscissae and
return an array of shape ``(ncomp, n)`` (or ``(n,)`` for a single
component).  Every active panel of one refinement round is evaluated in a
single call, which keeps Python overhead flat for the nested integrals used
by the potential engine.

Panels are refined and accumulated in a fixed order, so results are
bit-identical between runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "QuadratureResult",
    "QuadratureError",
    "integrate_semi_infinite",
    "integrate_interval",
    "integrate_batch",
    "integrate_nested",
]

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node layout on [-1, 1] with matching weights.
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (x1, x3, x5, 0).
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GW[_i] = _w
    _GW[14 - _i] = _w
_GW[7] = _WG[3]

_EPS = np.finfo(float).eps
MAPS = ("rational_map", "exp_decay_map")
# Below this multiple of eps times the L1 norm an error estimate is round-off.
ROUNDOFF_FLOOR = 50.0 * _EPS


class QuadratureError(ArithmeticError):
    """Raised when an integrand produces a non-finite value."""

    def __init__(self, message: str, abscissa: float | None = None):
        super().__init__(message)
        self.abscissa = abscissa


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    transform: str = "rational_map"

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be non-negative")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions must be at least 10")
        if self.transform not in MAPS:
            raise ValueError(f"unknown transform {self.transform!r}; expected one of {MAPS}")

    def tightened(self, factor: float = 10.0) -> "QuadratureSpec":
        return QuadratureSpec(self.rel_tol / factor, self.abs_tol / factor,
                              self.max_subdivisions, self.transform)


@dataclass
class QuadratureResult:
    value: float | np.ndarray
    error_estimate: float | np.ndarray
    evaluations: int
    converged: bool
    context: dict = field(default_factory=dict)

    def __float__(self):
        return float(np.asarray(self.value).ravel()[0])


def _map(t, lower, scale, kind):
    """Map t in [0, 1) onto [lower, inf); returns (x, dx/dt)."""
    # Tiny panels next to t = 1 can round a node onto the end point.
    one_minus = np.maximum(1.0 - t, _EPS)
    if kind == "rational_map":
        return lower + scale * (1.0 - one_minus) / one_minus, scale / one_minus**2
    return lower - scale * np.log(one_minus), scale / one_minus


def integrate_batch(f, lower, upper, *, rel_tol=1e-8, abs_tol=0.0, max_subdivisions=200,
                    ncomp=1, ngate=None):
    """Integrate many independent integrands over finite intervals at once.

    Parameters
    ----------
    f : callable
        ``f(item, x)`` with integer item indices and abscissae of equal length,
        returning an array of shape ``(ncomp, n)``.
    lower, upper : array_like
        Interval end points per item.
    ncomp : int
        Number of components returned by ``f``.
    ngate : int, optional
        Only the first ``ngate`` components decide convergence (default: all).

    Returns
    -------
    value, error, evaluations, converged
        ``value`` and ``error`` have shape ``(ncomp, nitems)``; ``converged``
        is a boolean array per item.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    nitems = lower.size
    ngate = ncomp if ngate is None else ngate
    owner = np.arange(nitems)
    a, b = lower.copy(), upper.copy()

    done_val = np.zeros((ncomp, nitems))
    done_err = np.zeros((ncomp, nitems))
    done_abs = np.zeros((ncomp, nitems))
    npanels = np.ones(nitems, dtype=int)
    converged = np.ones(nitems, dtype=bool)
    evaluations = 0

    while owner.size:
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        x = (mid[:, None] + half[:, None] * _NODES[None, :]).ravel()
        y = np.asarray(f(np.repeat(owner, 15), x), dtype=float).reshape(ncomp, owner.size, 15)
        evaluations += x.size
        if not np.all(np.isfinite(y)):
            bad = np.argwhere(~np.isfinite(y))[0]
            xbad = float(x.reshape(owner.size, 15)[bad[1], bad[2]])
            raise QuadratureError(f"integrand is not finite at x={xbad!r}", xbad)
        kron = (y @ _KW) * half
        err = np.abs(kron - (y @ _GW) * half)
        absk = (np.abs(y) @ _KW) * np.abs(half)

        tot_val, tot_err, tot_abs = done_val.copy(), done_err.copy(), done_abs.copy()
        for c in range(ncomp):
            np.add.at(tot_val[c], owner, kron[c])
            np.add.at(tot_err[c], owner, err[c])
            np.add.at(tot_abs[c], owner, absk[c])
        tol = np.maximum(np.maximum(rel_tol * np.abs(tot_val[:ngate]), abs_tol),
                         ROUNDOFF_FLOOR * tot_abs[:ngate])
        item_ok = np.all(tot_err[:ngate] <= tol, axis=0)

        # Split panels whose error exceeds half their share of the item's
        # tolerance; an unfinished item always splits at least its worst panel.
        ratio = err[:ngate] / np.maximum(tol[:, owner], 1e-300)
        want = np.any(ratio * npanels[owner] > 0.5, axis=0) & ~item_ok[owner]
        worst = np.full(nitems, -1.0)
        np.maximum.at(worst, owner, np.max(ratio, axis=0))
        stuck = ~item_ok & (np.bincount(owner[want], minlength=nitems) == 0)
        want |= stuck[owner] & (np.max(ratio, axis=0) == worst[owner])
        nsplit = np.bincount(owner[want], minlength=nitems)
        over = npanels + nsplit > max_subdivisions
        converged[over & ~item_ok] = False
        want &= ~over[owner]
        npanels += np.where(over, 0, nsplit)

        keep = ~want
        for c in range(ncomp):
            np.add.at(done_val[c], owner[keep], kron[c, keep])
            np.add.at(done_err[c], owner[keep], err[c, keep])
            np.add.at(done_abs[c], owner[keep], absk[c, keep])
        sa, sb = a[want], b[want]
        sm = 0.5 * (sa + sb)
        owner = np.repeat(owner[want], 2)
        a = np.column_stack([sa, sm]).ravel()
        b = np.column_stack([sm, sb]).ravel()

    return done_val, done_err, evaluations, converged


def _checked(values, x):
    """Raise :class:`QuadratureError` at the first non-finite value, reporting ``x``."""
    values = np.asarray(values, dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        column = np.argwhere(bad)[0][-1]
        xbad = float(np.asarray(x).ravel()[column])
        raise QuadratureError(f"integrand is not finite at x={xbad!r}", xbad)
    return values


def _squeeze(arr, ncomp):
    return float(arr[0]) if ncomp == 1 else np.asarray(arr, dtype=float)


def integrate_interval(f: Callable, a: float, b: float, spec: QuadratureSpec | None = None,
                       ncomp: int = 1) -> QuadratureResult:
    """Integrate a vectorised ``f(x)`` over the finite interval ``[a, b]``."""
    spec = spec or QuadratureSpec()

    def g(_items, x):
        return np.reshape(f(x), (ncomp, x.size))

    val, err, n, ok = integrate_batch(g, [a], [b], rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
                                      max_subdivisions=spec.max_subdivisions, ncomp=ncomp)
    return QuadratureResult(_squeeze(val[:, 0], ncomp), _squeeze(err[:, 0], ncomp), n, bool(ok[0]))


def integrate_semi_infinite(f: Callable, spec: QuadratureSpec | None = None, *, lower: float = 0.0,
                            scale: float = 1.0, ncomp: int = 1) -> QuadratureResult:
    """Integrate a vectorised ``f(x)`` over ``[lower, inf)``.

    The half line is mapped onto ``[0, 1)`` with ``spec.transform``;
    ``scale`` sets the length at which the map puts the midpoint of ``[0, 1)``
    and should match the decay length of the integrand.

    Non-convergence is reported through ``converged=False`` rather than an
    exception.  A non-finite integrand value raises :class:`QuadratureError`.
    """
    spec = spec or QuadratureSpec()

    def g(_items, t):
        x, jac = _map(t, lower, scale, spec.transform)
        return _checked(np.reshape(f(x), (ncomp, t.size)), x) * jac

    val, err, n, ok = integrate_batch(g, [0.0], [1.0], rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
                                      max_subdivisions=spec.max_subdivisions, ncomp=ncomp)
    return QuadratureResult(_squeeze(val[:, 0], ncomp), _squeeze(err[:, 0], ncomp), n, bool(ok[0]))


def integrate_nested(inner: Callable, outer_weight: Callable | None = None, *,
                     spec_outer: QuadratureSpec | None = None,
                     spec_inner: QuadratureSpec | None = None,
                     outer_scale: float = 1.0, inner_lower: Callable | float = 0.0,
                     inner_scale: Callable | float = 1.0, ncomp: int = 1,
                     combine: Callable | None = None, nout: int | None = None) -> QuadratureResult:
    """Double integral ``int_0^inf dx w(x) int_{l(x)}^inf dy g(x, y)``.

    ``inner(x, y)`` receives equal-length arrays and returns ``(ncomp, n)``.
    ``outer_weight(x)`` multiplies the inner result componentwise.  For more
    general outer integrands pass ``combine(x, inner_values)`` returning
    ``(nout, n)``; it must be linear in ``inner_values`` because the inner
    error estimates are pushed through it as well.  ``inner_lower`` and
    ``inner_scale`` may be callables of the outer abscissae.

    The inner tolerance defaults to a tenth of the outer one.  The reported
    error is the outer Kronrod-Gauss estimate plus the inner estimates
    integrated with the outer rule.  Inner non-convergence makes the result
    non-converged and lists the offending outer abscissae in ``context``.
    """
    spec_outer = spec_outer or QuadratureSpec()
    spec_inner = spec_inner or spec_outer.tightened(10.0)
    if combine is None:
        nout = ncomp

        def combine(x, v):
            return v if outer_weight is None else v * outer_weight(x)
    elif nout is None:
        raise ValueError("nout is required together with combine")
    inner_failures: list[float] = []
    evals = [0]

    def lo(x):
        return np.broadcast_to(inner_lower(x) if callable(inner_lower) else inner_lower, x.shape)

    def sc(x):
        return np.broadcast_to(inner_scale(x) if callable(inner_scale) else inner_scale, x.shape)

    def outer_f(_items, t):
        x, jac = _map(t, 0.0, outer_scale, spec_outer.transform)
        l, s = lo(x), sc(x)

        def g(items, tau):
            y, jy = _map(tau, l[items], s[items], spec_inner.transform)
            return _checked(np.reshape(inner(x[items], y), (ncomp, tau.size)), y) * jy

        val, err, n, ok = integrate_batch(g, np.zeros(x.size), np.ones(x.size),
                                          rel_tol=spec_inner.rel_tol, abs_tol=spec_inner.abs_tol,
                                          max_subdivisions=spec_inner.max_subdivisions,
                                          ncomp=ncomp)
        evals[0] += n
        if not ok.all():
            inner_failures.extend(float(v) for v in x[~ok])
        out = np.reshape(combine(x, val), (nout, x.size)) * jac
        out_err = np.abs(np.reshape(combine(x, err), (nout, x.size)) * jac)
        # Inner errors ride along as extra, non-gating components.
        return np.concatenate([out, out_err])

    val, err, n, ok = integrate_batch(outer_f, [0.0], [1.0], rel_tol=spec_outer.rel_tol,
                                      abs_tol=spec_outer.abs_tol,
                                      max_subdivisions=spec_outer.max_subdivisions,
                                      ncomp=2 * nout, ngate=nout)
    value = val[:nout, 0]
    error = err[:nout, 0] + np.abs(val[nout:, 0])
    converged = bool(ok[0]) and not inner_failures
    context = {"inner_failures": inner_failures[:10]} if inner_failures else {}
    return QuadratureResult(_squeeze(value, nout), _squeeze(error, nout), n + evals[0],
                            converged, context)
