"""Basis reduction: algebraic Gauss, algebraic LLL, and classic real LLL.

The algebraic algorithms quantize Gram-Schmidt coefficients to the ring and
keep the unimodular transform exact.  QR factors are maintained incrementally
and the R structure is restored after each column swap by a 2x2 unitary
rotation (the matrix form of a quaternion).
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .lattices import ComplexBasis, RingMatrix, orthogonality_defect
from .rings import RingSpec, quantize

__all__ = [
    "BoundCheck",
    "ReductionReport",
    "NonEuclideanRingWarning",
    "gauss_reduce",
    "alll_reduce",
    "real_lll",
    "quaternion_rotation",
    "potential",
    "decoding_radius",
    "decoding_radius_bound",
]

GAUSS_ITER_FACTOR = 64
REFACTOR_EVERY = 100
STALL_RATIO = 1.0 - 1e-12


class NonEuclideanRingWarning(UserWarning):
    """Reduction over a ring whose quality guarantees do not apply."""


@dataclass
class BoundCheck:
    name: str
    lhs: float
    rhs: float
    passed: bool
    skipped: bool = False
    note: str = ""

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "passed": self.passed,
            "skipped": self.skipped,
            "slack": self.slack,
            "note": self.note,
        }


@dataclass
class ReductionReport:
    reduced: ComplexBasis
    transform: RingMatrix
    swaps: int
    size_reductions: int
    delta: float | None
    bound_checks: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    events: list = field(default_factory=list)
    potential_ratios: list = field(default_factory=list)
    norms_squared_exact: list | None = None
    stalled: bool = False
    wall_time: float = 0.0

    @property
    def norms(self) -> list[float]:
        return [float(x) for x in np.linalg.norm(self.reduced.matrix, axis=0)]

    def bounds_ok(self) -> bool:
        return all(c.passed or c.skipped for c in self.bound_checks.values())

    def as_dict(self) -> dict:
        return {
            "norms": self.norms,
            "norms_squared": [x**2 for x in self.norms],
            "norms_squared_exact": self.norms_squared_exact,
            "swaps": self.swaps,
            "size_reductions": self.size_reductions,
            "delta": self.delta,
            "events": self.events,
            "warnings": self.warnings,
            "stalled": self.stalled,
            "bound_checks": {k: v.as_dict() for k, v in self.bound_checks.items()},
            "wall_time_s": self.wall_time,
        }


def _exact_norms_squared(basis: ComplexBasis, transform: RingMatrix) -> list | None:
    """Column norms as exact integers when the input has exact ring entries."""
    exact = basis.exact_entries()
    if exact is None:
        return None
    reduced = exact @ transform
    return [
        sum(reduced[i, j].norm() for i in range(exact.n)) for j in range(exact.n)
    ]


# ---------------------------------------------------------------------------
# Gauss reduction in two dimensions


class ComplexBasisColumn:
    """Mutable column wrapper so swaps stay cheap and explicit."""

    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def norm2(self) -> float:
        return float(np.vdot(self.v, self.v).real)


def gauss_reduce(b1, b2, ring: RingSpec) -> ReductionReport:
    """Reduce a rank-2 basis so that ||b1|| <= ||b2|| and the Gram-Schmidt
    coefficient of the pair quantizes to zero.

    For norm-Euclidean rings the output norms are exactly the two successive
    minima of the lattice; other rings get a warning flag instead.
    """
    t0 = time.perf_counter()
    b1 = np.array(b1, dtype=complex)
    b2 = np.array(b2, dtype=complex)
    if b1.shape != b2.shape or b1.ndim != 1:
        raise ValueError("inputs must be complex vectors of equal length")
    basis = ComplexBasis(np.column_stack([b1, b2]), ring)  # validates independence
    warns = []
    if not ring.euclidean:
        warns.append(f"ring d={ring.d} is not norm-Euclidean; minima not guaranteed")
        warnings.warn(warns[-1], NonEuclideanRingWarning, stacklevel=2)

    cols = [ComplexBasisColumn(b1.copy()), ComplexBasisColumn(b2.copy())]
    ucols = [
        [ring.one, ring.zero],
        [ring.zero, ring.one],
    ]
    events: list[str] = []
    swaps = size_reductions = 0

    def do_swap():
        nonlocal swaps
        cols[0], cols[1] = cols[1], cols[0]
        ucols[0], ucols[1] = ucols[1], ucols[0]
        swaps += 1
        events.append("swap")

    if cols[0].norm2() > cols[1].norm2():
        do_swap()

    max_iters = GAUSS_ITER_FACTOR * max(2, len(b1))
    for _ in range(max_iters):
        mu = np.vdot(cols[0].v, cols[1].v) / cols[0].norm2()
        c = quantize(mu, ring)
        if not c.is_zero():
            cols[1].v = cols[1].v - c.embed() * cols[0].v
            ucols[1] = [ucols[1][i] - c * ucols[0][i] for i in range(2)]
            size_reductions += 1
            events.append("size_reduction")
        if cols[1].norm2() >= cols[0].norm2():
            break
        do_swap()
    else:
        raise RuntimeError("gauss reduction exceeded its iteration budget")

    transform = RingMatrix.from_columns([tuple(ucols[0]), tuple(ucols[1])], ring)
    reduced = ComplexBasis(np.column_stack([cols[0].v, cols[1].v]), ring)
    report = ReductionReport(
        reduced=reduced,
        transform=transform,
        swaps=swaps,
        size_reductions=size_reductions,
        delta=None,
        warnings=warns,
        events=events,
        norms_squared_exact=_exact_norms_squared(basis, transform),
        wall_time=time.perf_counter() - t0,
    )
    return report


# ---------------------------------------------------------------------------
# QR helpers


def quaternion_rotation(r_above: complex, r_below: complex) -> np.ndarray:
    """Unitary 2x2 rotation sending [r_above; r_below] to [s; 0], s > 0.

    This is the matrix form of the quaternion whose complex pair is
    (conj(r_above)/s, -r_below/s); it restores triangularity after a column
    swap without refactoring.
    """
    s = math.hypot(abs(r_above), abs(r_below))
    if s == 0.0:
        raise ValueError("cannot rotate a zero column segment")
    return np.array(
        [
            [np.conj(r_above) / s, np.conj(r_below) / s],
            [-r_below / s, r_above / s],
        ],
        dtype=complex,
    )


def _phase_normalize(Q: np.ndarray, R: np.ndarray, rows) -> None:
    """Rescale so R has a real-positive diagonal, absorbing phases into Q."""
    for i in rows:
        rii = R[i, i]
        mag = abs(rii)
        if mag == 0.0:
            continue
        phase = rii / mag
        R[i, :] *= np.conj(phase)
        Q[:, i] *= phase


def _qr_positive(B: np.ndarray):
    Q, R = np.linalg.qr(B)
    _phase_normalize(Q, R, range(B.shape[0]))
    return Q, R


def potential(R: np.ndarray) -> float:
    """prod_j |R_jj|^(2(n-j+1)); strictly decreases at every LLL swap."""
    n = R.shape[0]
    diag = np.abs(np.diag(R))
    return float(np.prod(diag ** (2 * (n - np.arange(n)))))


def decoding_radius(R: np.ndarray, k: int) -> float:
    """Half the smallest |R_jj| over the leading k columns."""
    if not 1 <= k <= R.shape[0]:
        raise ValueError(f"k must be in [1, {R.shape[0]}]")
    return 0.5 * float(np.min(np.abs(np.diag(R)[:k])))


def _unit_ball_volume(dim: int) -> float:
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


def decoding_radius_bound(ring: RingSpec, n: int, k: int, lambda1: float, eps: float) -> float:
    """Lower bound on the decoding radius of size reduction in round k+1."""
    v2n = _unit_ball_volume(2 * n)
    return 0.25 * lambda1 * v2n ** (1.0 / (2 * n)) / ring.det_phi * eps ** ((k * k - k) / 4.0)


# ---------------------------------------------------------------------------
# Algebraic LLL


def alll_reduce(
    basis: ComplexBasis,
    delta: float = 0.99,
    lambda1: float | None = None,
) -> ReductionReport:
    """Algebraic LLL reduction of a complex basis over its ring.

    The output satisfies the ring size-reduction condition (all off-diagonal
    Gram-Schmidt ratios quantize to zero) and the Lovasz condition with
    parameter delta.  Quality bounds are evaluated with eps = delta - rho^2
    where rho is the covering radius of the ring; for non-Euclidean rings
    eps <= 0 and the bound checks are skipped with a warning.
    """
    t0 = time.perf_counter()
    ring = basis.ring
    n = basis.n
    rho2 = ring.covering_radius**2
    if delta > 1.0:
        raise ValueError(f"delta must be <= 1, got {delta}")
    warns: list[str] = []
    if ring.euclidean:
        if delta <= rho2:
            raise ValueError(
                f"delta={delta} <= rho^2={rho2:.4f} for d={ring.d}: the swap "
                "potential argument needs delta > rho^2"
            )
    else:
        warns.append(
            f"ring d={ring.d} is not norm-Euclidean (rho^2={rho2:.3f} >= 1); "
            "reduction proceeds without quality guarantees"
        )
        warnings.warn(warns[-1], NonEuclideanRingWarning, stacklevel=2)

    B = np.array(basis.matrix, dtype=complex)
    Q, R = _qr_positive(B)
    ucols = [list(col) for col in RingMatrix.identity(n, ring).columns()]

    swaps = size_reductions = 0
    events: list[str] = []
    pot_ratios: list[float] = []
    stalled = False
    stall_run = 0

    def refactor():
        nonlocal Q, R
        u_embed = np.array(
            [[e.embed() for e in _rows_from_cols(ucols, n)[i]] for i in range(n)],
            dtype=complex,
        )
        Q, R = _qr_positive(B @ u_embed)

    j = 1
    while j < n:
        for k in range(j - 1, -1, -1):
            c = quantize(R[k, j] / R[k, k], ring)
            if not c.is_zero():
                ce = c.embed()
                R[: k + 1, j] -= ce * R[: k + 1, k]
                ucols[j] = [ucols[j][i] - c * ucols[k][i] for i in range(n)]
                size_reductions += 1
                events.append(f"size_reduction:{j}")
        if delta * abs(R[j - 1, j - 1]) ** 2 > abs(R[j, j]) ** 2 + abs(R[j - 1, j]) ** 2:
            ratio = (abs(R[j - 1, j]) ** 2 + abs(R[j, j]) ** 2) / abs(R[j - 1, j - 1]) ** 2
            pot_ratios.append(ratio)
            M = quaternion_rotation(R[j - 1, j], R[j, j])
            R[:, [j - 1, j]] = R[:, [j, j - 1]]
            ucols[j - 1], ucols[j] = ucols[j], ucols[j - 1]
            R[j - 1 : j + 1, :] = M @ R[j - 1 : j + 1, :]
            Q[:, j - 1 : j + 1] = Q[:, j - 1 : j + 1] @ M.conj().T
            R[j, j - 1] = 0.0
            _phase_normalize(Q, R, (j - 1, j))
            swaps += 1
            events.append(f"swap:{j}")
            if swaps % REFACTOR_EVERY == 0:
                refactor()
            if ratio >= STALL_RATIO:
                stall_run += 1
                if stall_run >= 3 * n:
                    stalled = True
                    warns.append("terminated after repeated swaps with no potential progress")
                    break
            else:
                stall_run = 0
            j = max(j - 1, 1)
        else:
            j += 1

    transform = RingMatrix.from_columns([tuple(c) for c in ucols], ring)
    reduced = ComplexBasis(B @ transform.to_complex(), ring)
    report = ReductionReport(
        reduced=reduced,
        transform=transform,
        swaps=swaps,
        size_reductions=size_reductions,
        delta=delta,
        warnings=warns,
        events=events,
        potential_ratios=pot_ratios,
        norms_squared_exact=_exact_norms_squared(basis, transform),
        stalled=stalled,
        wall_time=time.perf_counter() - t0,
    )
    report.bound_checks = _quality_checks(basis, report, lambda1=lambda1)
    report.wall_time = time.perf_counter() - t0
    return report


def _rows_from_cols(cols, n):
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def reduction_epsilon(ring: RingSpec, delta: float) -> float:
    """eps = delta - rho^2, clamped to (0, 1]; <= 0 means no guarantees."""
    eps = delta - ring.covering_radius**2
    return min(eps, 1.0)


def _quality_checks(basis: ComplexBasis, report: ReductionReport, lambda1=None) -> dict:
    ring = basis.ring
    n = basis.n
    checks: dict[str, BoundCheck] = {}
    eps = reduction_epsilon(ring, report.delta)
    first = report.norms[0]
    if eps <= 0.0:
        for name in ("first_vs_det", "first_vs_lambda1", "od_bound", "decoding_radius"):
            checks[name] = BoundCheck(
                name, 0.0, 0.0, passed=True, skipped=True,
                note="eps <= 0 for this ring; no quality guarantee",
            )
        return checks

    absdet = abs(np.linalg.det(basis.matrix))
    checks["first_vs_det"] = _mk_check(
        "first_vs_det", first, eps ** (-(n - 1) / 4.0) * absdet ** (1.0 / n)
    )
    od = orthogonality_defect(report.reduced)
    rho2 = ring.covering_radius**2
    prod = 1.0
    for jj in range(1, n + 1):
        geo = sum(eps ** (-t) for t in range(1, jj))
        prod *= math.sqrt(1.0 + rho2 * geo)
    checks["od_bound"] = _mk_check("od_bound", od, ring.det_phi ** (-n) * prod)
    if lambda1 is not None:
        checks["first_vs_lambda1"] = _mk_check(
            "first_vs_lambda1", first, eps ** (-(n - 1) / 2.0) * lambda1
        )
        _, Rred = _qr_positive(report.reduced.matrix)
        radius = float(decoding_radius(Rred, n))
        floor = float(decoding_radius_bound(ring, n, n, lambda1, eps))
        checks["decoding_radius"] = BoundCheck(
            "decoding_radius", floor, radius, passed=bool(radius >= floor - 1e-9)
        )
    return checks


def _mk_check(name: str, lhs: float, rhs: float, tol: float = 1e-9) -> BoundCheck:
    lhs, rhs = float(lhs), float(rhs)
    return BoundCheck(name, lhs, rhs, passed=bool(lhs <= rhs * (1.0 + tol) + tol))


# ---------------------------------------------------------------------------
# classic real LLL on embedded bases


def real_lll(matrix: np.ndarray, delta: float = 0.99, max_steps: int | None = None):
    """LLL-reduce the columns of a real matrix; returns (reduced, T, swaps).

    T is the integer unimodular transform with reduced = matrix @ T.  delta=1
    is allowed but only iteration-capped (termination is not guaranteed in
    general at the boundary).
    """
    if not 0.25 < delta <= 1.0:
        raise ValueError(f"delta must be in (0.25, 1], got {delta}")
    B = np.array(matrix, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise ValueError("basis must be a square matrix")
    m = B.shape[0]
    T = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    swaps = 0
    if max_steps is None:
        max_steps = 20000 * m

    def fresh_r():
        _, r = np.linalg.qr(B)
        signs = np.sign(np.diag(r))
        signs[signs == 0] = 1.0
        return r * signs[:, None]

    R = fresh_r()
    k = 1
    steps = 0
    while k < m:
        steps += 1
        if steps > max_steps:
            warnings.warn("real LLL hit its iteration cap; output may be partial")
            break
        for j in range(k - 1, -1, -1):
            c = _round_half_down(R[j, k] / R[j, j])
            if c:
                R[: j + 1, k] -= c * R[: j + 1, j]
                B[:, k] -= c * B[:, j]
                for i in range(m):
                    T[i][k] -= c * T[i][j]
        if delta * R[k - 1, k - 1] ** 2 > R[k, k] ** 2 + R[k - 1, k] ** 2:
            B[:, [k - 1, k]] = B[:, [k, k - 1]]
            for i in range(m):
                T[i][k - 1], T[i][k] = T[i][k], T[i][k - 1]
            swaps += 1
            # restore triangularity with a Givens rotation on rows k-1, k
            R[:, [k - 1, k]] = R[:, [k, k - 1]]
            a, b = R[k - 1, k - 1], R[k, k - 1]
            s = math.hypot(a, b)
            G = np.array([[a / s, b / s], [-b / s, a / s]])
            R[k - 1 : k + 1, :] = G @ R[k - 1 : k + 1, :]
            R[k, k - 1] = 0.0
            if R[k, k] < 0:
                R[k, :] *= -1.0
            if swaps % REFACTOR_EVERY == 0:
                R = fresh_r()
            k = max(k - 1, 1)
        else:
            k += 1
    Tm = np.array(T, dtype=object)
    return B, Tm, swaps


def _round_half_down(x: float) -> int:
    """Nearest integer, ties toward the smaller integer."""
    return math.ceil(x - 0.5)
