"""Exact shortest-vector oracle via depth-first sphere decoding.

The complex basis is reduced over its ring first (a lattice-preserving
preprocessing step), then embedded into R^(2n) with the two real coordinates
of each ring coefficient kept adjacent, so the enumeration can exploit the
unit group: only one representative per orbit under multiplication by units
is visited (a quarter of the points for the Gaussian integers, a sixth for
the Eisenstein integers, half elsewhere).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattices import ComplexBasis, RingMatrix, coeff_to_complex
from .reduction import NonEuclideanRingWarning, alll_reduce, gauss_reduce
from .rings import RingElem, RingSpec, units

__all__ = [
    "SvpResult",
    "EnumerationBudgetError",
    "shortest_vector",
    "successive_minima_2d",
]

MAX_RANK = 8
DEFAULT_NODE_BUDGET = 10**8


class EnumerationBudgetError(RuntimeError):
    def __init__(self, nodes: int, partial_radius: float):
        super().__init__(
            f"enumeration budget of {nodes} nodes exceeded; "
            f"best radius so far {partial_radius:.6g}"
        )
        self.nodes = nodes
        self.partial_radius = partial_radius


@dataclass(frozen=True)
class SvpResult:
    coefficient: tuple
    norm: float
    enumerated_nodes: int

    @property
    def norm_squared(self) -> float:
        return self.norm**2


def _enum_shortest_py(R, best2, mode, budget, x_init):
    """Depth-first enumeration of the shortest nonzero vector.

    R: upper triangular with positive diagonal, m = 2 * (ring rank).
    mode: 0 no symmetry pruning, 1 sign symmetry, 2 four/six-fold symmetry.
    Level 2j holds the integer part of ring coordinate j, level 2j+1 the xi
    part; levels are decided from m-1 downward.  While every coordinate
    decided so far is zero, the current pair is restricted to one canonical
    sector of the unit-group action.

    Returns (status, best_x, best_norm2, nodes); status 1 = budget exceeded.
    """
    m = R.shape[0]
    x = np.zeros(m, dtype=np.int64)
    best_x = x_init.copy()
    center = np.zeros(m)
    pdist = np.zeros(m)  # squared contribution of levels above i
    step = np.zeros(m, dtype=np.int64)
    constrained = np.zeros(m, dtype=np.uint8)
    nzsuf = np.zeros(m, dtype=np.int64)  # nonzero count at levels > i
    nodes = 0

    def init_level(i):
        lo_active = False
        lo = 0
        if mode > 0:
            if i % 2 == 1:  # xi-part of pair i//2
                if nzsuf[i] == 0:
                    lo_active = True
                    lo = 0
            else:  # integer part; its xi-part sits at level i+1
                pair_suffix_zero = nzsuf[i + 1] == 0 if i + 1 < m else True
                if pair_suffix_zero:
                    if x[i + 1] == 0:
                        lo_active = True
                        lo = 0
                    elif mode == 2:
                        lo_active = True
                        lo = 1
        if lo_active:
            constrained[i] = 1
            x[i] = lo
        else:
            constrained[i] = 0
            x0 = math.floor(center[i] + 0.5)
            x[i] = x0
            step[i] = 1 if center[i] >= x0 else -1

    def advance(i):
        if constrained[i]:
            x[i] += 1
        else:
            x[i] += step[i]
            step[i] = -step[i] - (1 if step[i] > 0 else -1)

    i = m - 1
    center[i] = 0.0
    nzsuf[i] = 0
    init_level(i)
    cur_best2 = best2
    while True:
        nodes += 1
        if nodes > budget:
            return 1, best_x, cur_best2, nodes
        y = R[i, i] * (x[i] - center[i])
        d = pdist[i] + y * y
        if d < cur_best2:
            if i == 0:
                if nzsuf[0] + (1 if x[0] != 0 else 0) > 0:
                    cur_best2 = d
                    best_x[:] = x
                advance(0)
            else:
                nzsuf[i - 1] = nzsuf[i] + (1 if x[i] != 0 else 0)
                pdist[i - 1] = d
                i -= 1
                acc = 0.0
                for k in range(i + 1, m):
                    acc += R[i, k] * x[k]
                center[i] = -acc / R[i, i]
                init_level(i)
        else:
            # ascending-from-bound levels are only monotone past the center
            if constrained[i] and x[i] < center[i]:
                advance(i)
                continue
            i += 1
            if i == m:
                return 0, best_x, cur_best2, nodes
            advance(i)


try:  # hot loop; the pure-Python form is the reference implementation
    from numba import njit

    _enum_shortest = njit(cache=True)(_enum_shortest_py)
except ImportError:  # pragma: no cover
    _enum_shortest = _enum_shortest_py


def _interleaved_embedding(matrix: np.ndarray, ring: RingSpec) -> np.ndarray:
    """Real generator with columns [stack(b_j), stack(xi*b_j)] interleaved."""
    n = matrix.shape[0]
    M = np.empty((2 * n, 2 * n))
    xi = ring.xi
    for j in range(n):
        col = matrix[:, j]
        xcol = xi * col
        M[:n, 2 * j] = col.real
        M[n:, 2 * j] = col.imag
        M[:n, 2 * j + 1] = xcol.real
        M[n:, 2 * j + 1] = xcol.imag
    return M


def _positive_qr(M: np.ndarray):
    Q, R = np.linalg.qr(M)
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    return Q * s[None, :], R * s[:, None]


def _symmetry_mode(ring: RingSpec, use_symmetry: bool) -> int:
    if not use_symmetry:
        return 0
    return 2 if len(units(ring)) > 2 else 1


def _in_canonical_sector(e: RingElem, n_units: int) -> bool:
    if e.b == 0:
        return e.a > 0
    if e.b < 0:
        return False
    return True if n_units == 2 else e.a >= 1


def canonicalize_by_unit(coeff, ring: RingSpec):
    """Scale by the unit that puts the first nonzero entry in the canonical sector."""
    us = units(ring)
    first = next((e for e in coeff if not e.is_zero()), None)
    if first is None:
        return tuple(coeff)
    for u in us:
        if _in_canonical_sector(u * first, len(us)):
            return tuple(u * e for e in coeff)
    return tuple(coeff)


def _reduce_for_enumeration(basis: ComplexBasis):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonEuclideanRingWarning)
        rep = alll_reduce(basis, delta=0.99)
    return rep.reduced.matrix, rep.transform


def shortest_vector(
    basis: ComplexBasis,
    use_symmetry: bool = True,
    max_nodes: int = DEFAULT_NODE_BUDGET,
    preprocess: bool = True,
) -> SvpResult:
    """Globally shortest nonzero lattice vector, as a ring coefficient vector.

    Reduction supplies the initial enumeration radius, so the search only has
    to certify (or beat) the reduced first vector.  The returned coefficient
    is the canonical representative of its unit orbit.
    """
    ring = basis.ring
    n = basis.n
    if n > MAX_RANK:
        raise ValueError(f"rank {n} exceeds the enumeration limit of {MAX_RANK}")
    if n == 1:
        coeff = (ring.one,)
        return SvpResult(coeff, float(np.linalg.norm(basis.matrix[:, 0])), 0)

    if preprocess:
        Bred, U = _reduce_for_enumeration(basis)
    else:
        Bred, U = np.array(basis.matrix), RingMatrix.identity(n, ring)

    M = _interleaved_embedding(Bred, ring)
    _, R = _positive_qr(M)
    col_norms2 = np.sum(np.abs(Bred) ** 2, axis=0)
    jmin = int(np.argmin(col_norms2))
    x_init = np.zeros(2 * n, dtype=np.int64)
    x_init[2 * jmin] = 1
    best2 = float(col_norms2[jmin]) * (1.0 + 1e-9)

    mode = _symmetry_mode(ring, use_symmetry)
    status, xbest, _, nodes = _enum_shortest(
        np.ascontiguousarray(R), best2, mode, max_nodes, x_init
    )
    if status == 1:
        raise EnumerationBudgetError(nodes, math.sqrt(best2))

    coeff_red = tuple(ring.elem(int(xbest[2 * j]), int(xbest[2 * j + 1])) for j in range(n))
    coeff = canonicalize_by_unit(U @ coeff_red, ring)
    norm = float(np.linalg.norm(basis.matrix @ coeff_to_complex(coeff)))
    return SvpResult(coeff, norm, int(nodes))


def _enum_collect(R, radius2, mode):
    """All coefficient vectors with squared norm <= radius2 (one per unit orbit
    when mode > 0), as (dist2, x tuple) pairs."""
    m = R.shape[0]
    x = [0] * m
    sols = []

    def rec(i, pdist, nz):
        acc = 0.0
        for k in range(i + 1, m):
            acc += R[i, k] * x[k]
        c = -acc / R[i, i]
        w = math.sqrt(max(radius2 - pdist, 0.0)) / R[i, i]
        lo = math.ceil(c - w - 1e-12)
        hi = math.floor(c + w + 1e-12)
        if mode > 0:
            if i % 2 == 1:
                if nz == 0:
                    lo = max(lo, 0)
            else:
                pair_zero = (nz - (1 if x[i + 1] != 0 else 0)) == 0 if i + 1 < m else True
                if pair_zero:
                    if x[i + 1] == 0 and nz == 0:
                        lo = max(lo, 0)
                    elif x[i + 1] > 0 and mode == 2:
                        lo = max(lo, 1)
        for xi in range(lo, hi + 1):
            y = R[i, i] * (xi - c)
            d = pdist + y * y
            if d > radius2 * (1.0 + 1e-12) + 1e-12:
                continue
            x[i] = xi
            if i == 0:
                if nz + (1 if xi != 0 else 0) > 0:
                    sols.append((d, tuple(x)))
            else:
                rec(i - 1, d, nz + (1 if xi != 0 else 0))
        x[i] = 0

    rec(m - 1, 0.0, 0)
    return sols


def successive_minima_2d(basis: ComplexBasis, max_nodes: int = DEFAULT_NODE_BUDGET):
    """First two successive minima of a rank-2 lattice with witness vectors.

    lambda2 is found by enumerating all vectors up to the norm of the second
    reduced basis vector (always an upper bound for lambda2) and taking the
    shortest one whose coefficient pair is ring-independent of the first.
    """
    if basis.n != 2:
        raise ValueError("successive_minima_2d needs a rank-2 basis")
    ring = basis.ring
    r1 = shortest_vector(basis, max_nodes=max_nodes)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonEuclideanRingWarning)
        rep = gauss_reduce(basis.matrix[:, 0], basis.matrix[:, 1], ring)
    Bred, U = rep.reduced.matrix, rep.transform
    M = _interleaved_embedding(Bred, ring)
    _, R = _positive_qr(M)
    radius2 = float(max(np.sum(np.abs(Bred) ** 2, axis=0)))

    mode = _symmetry_mode(ring, True)
    c1 = r1.coefficient
    for _ in range(6):
        sols = sorted(_enum_collect(np.ascontiguousarray(R), radius2 * (1 + 1e-9), mode))
        for d, xv in sols:
            coeff_red = tuple(ring.elem(xv[2 * j], xv[2 * j + 1]) for j in range(2))
            cand = U @ coeff_red
            cross = c1[0] * cand[1] - c1[1] * cand[0]
            if not cross.is_zero():
                cand = canonicalize_by_unit(cand, ring)
                lam2 = float(np.linalg.norm(basis.matrix @ coeff_to_complex(cand)))
                return r1.norm, lam2, (c1, cand)
        radius2 *= 1.5
    raise RuntimeError("no independent second minimum found; basis may be degenerate")
