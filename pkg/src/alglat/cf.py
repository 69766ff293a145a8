"""Compute-and-forward: channel lattices, rates, and coefficient design.

A relay observing y = sum_l h_l x_l + z decodes an integer combination with
ring coefficients a; the achievable computation rate is
log2+(1 / a^H (I + P h h^H)^-1 a).  Squared lengths in the lattice spanned by
a basis B with B^H B = (I + P h h^H)^-1 equal that quadratic form, so short
vectors are high-rate coefficients and lattice reduction designs whole
unimodular coefficient matrices at once.  Unimodularity guarantees the mapped
matrix is invertible over the finite field used by the code space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .lattices import (
    ComplexBasis,
    RingMatrix,
    coeff_to_complex,
    embed,
    hermite_constant_2n,
)
from .reduction import NonEuclideanRingWarning, alll_reduce, real_lll, reduction_epsilon
from .rings import FieldMorphism, RingSpec, morphism_new
from .svp import shortest_vector

__all__ = [
    "Channel",
    "RelayDesign",
    "NetworkDesign",
    "STRATEGIES",
    "cf_basis",
    "computation_rate",
    "design_relay",
    "transmission_rate",
    "rank_mod_p",
    "det_mod_p",
    "default_morphism",
    "dof_slope",
    "rank_failure_probability",
    "random_channel",
    "db_to_linear",
]

STRATEGIES = ("alll", "rlll", "svp", "best_single")


def db_to_linear(p_db: float) -> float:
    return 10.0 ** (p_db / 10.0)


@dataclass(frozen=True)
class Channel:
    """Complex channel vector of one relay with linear-scale SNR P."""

    h: np.ndarray
    p: float

    def __post_init__(self):
        h = np.array(self.h, dtype=complex)
        if h.ndim != 1:
            raise ValueError("channel must be a vector")
        if not np.all(np.isfinite(h.view(float))):
            raise ValueError("channel has non-finite entries")
        if not (self.p > 0 and math.isfinite(self.p)):
            raise ValueError(f"SNR must be positive and finite, got {self.p}")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @classmethod
    def from_db(cls, h, p_db: float) -> "Channel":
        return cls(np.array(h, dtype=complex), db_to_linear(p_db))

    @property
    def n(self) -> int:
        return self.h.shape[0]

    def gram(self) -> np.ndarray:
        """I + P h h^H."""
        h = self.h[:, None]
        return np.eye(self.n) + self.p * (h @ h.conj().T)


def random_channel(n: int, p_linear: float, rng) -> Channel:
    """Circularly-symmetric complex Gaussian channel, unit total variance."""
    h = math.sqrt(0.5) * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return Channel(h, p_linear)


def cf_basis(ch: Channel, ring: RingSpec) -> ComplexBasis:
    """Basis B with B^H B = (I + P h h^H)^-1, so ||B a||^2 is the rate denominator."""
    M = ch.gram()
    L = np.linalg.cholesky(M)
    B = np.linalg.inv(L)  # lower triangular inverse; B^H B = M^-1
    return ComplexBasis(B, ring)


def _rate_from_denominator(den: float) -> float:
    if den <= 0:
        raise ValueError(f"rate denominator must be positive, got {den}")
    return max(0.0, math.log2(1.0 / den))


def computation_rate(ch: Channel, coeff) -> float:
    """log2+(1 / a^H (I + P h h^H)^-1 a) in bits, for a ring coefficient vector."""
    a = coeff_to_complex(coeff)
    if not np.any(a):
        raise ValueError("coefficient vector must be nonzero")
    den = float(np.real(a.conj() @ np.linalg.solve(ch.gram(), a)))
    return _rate_from_denominator(den)


@dataclass
class RelayDesign:
    """One relay's candidate coefficient vectors, sorted by descending rate."""

    channel: Channel
    ring: RingSpec
    strategy: str
    vectors: list
    rates: list
    matrix: RingMatrix | None
    swaps: int
    first_norm: float

    @property
    def best_rate(self) -> float:
        return self.rates[0]

    @property
    def best_vector(self):
        return self.vectors[0]


@dataclass
class NetworkDesign:
    matrices: list
    chosen_index: int
    rate: float
    field_rank_ok: bool
    det_commutes: bool

    @property
    def chosen_matrix(self) -> RingMatrix:
        return self.matrices[self.chosen_index]


def _fold_real_column(col, ring: RingSpec):
    n = len(col) // 2
    return tuple(ring.elem(int(col[j]), int(col[j + n])) for j in range(n))


def design_relay(
    ch: Channel,
    ring: RingSpec,
    strategy: str = "alll",
    delta: float = 0.99,
) -> RelayDesign:
    """Design candidate coefficient vectors for one relay.

    alll / rlll return every transform column sorted by descending rate (for
    alll the columns form a unimodular ring matrix); svp and best_single
    return the single highest-rate coefficient.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    basis = cf_basis(ch, ring)
    gram_inv = np.linalg.inv(ch.gram())

    def rate_of(vec) -> float:
        a = coeff_to_complex(vec)
        den = float(np.real(a.conj() @ (gram_inv @ a)))
        return _rate_from_denominator(den)

    if strategy == "alll":
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonEuclideanRingWarning)
            rep = alll_reduce(basis, delta=delta)
        cols = rep.transform.columns()
        rates = [rate_of(c) for c in cols]
        order = sorted(range(len(cols)), key=lambda i: -rates[i])
        matrix = RingMatrix.from_columns([cols[i] for i in order], ring)
        vectors = [cols[i] for i in order]
        rates = [rates[i] for i in order]
        first_norm = float(np.linalg.norm(basis.matrix @ coeff_to_complex(vectors[0])))
        return RelayDesign(ch, ring, strategy, vectors, rates, matrix, rep.swaps, first_norm)

    if strategy == "rlll":
        real = embed(basis)
        _, T, swaps = real_lll(real.matrix, delta=delta)
        cols = [_fold_real_column(T[:, j], ring) for j in range(T.shape[1])]
        rates = [rate_of(c) for c in cols]
        order = sorted(range(len(cols)), key=lambda i: -rates[i])
        vectors = [cols[i] for i in order]
        rates = [rates[i] for i in order]
        first_norm = float(np.linalg.norm(basis.matrix @ coeff_to_complex(vectors[0])))
        return RelayDesign(ch, ring, strategy, vectors, rates, None, swaps, first_norm)

    # svp / best_single: the single best equation
    res = shortest_vector(basis)
    vec = res.coefficient
    return RelayDesign(ch, ring, strategy, [vec], [rate_of(vec)], None, 0, res.norm)


def rank_mod_p(matrix: RingMatrix, morphism: FieldMorphism) -> int:
    """Rank of the entrywise-mapped matrix over F_p by Gaussian elimination."""
    a = [[int(v) for v in row] for row in matrix.map_mod_p(morphism)]
    p = morphism.p
    n = len(a)
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, n) if a[r][col] % p != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        inv = pow(a[rank][col], -1, p)
        a[rank] = [(v * inv) % p for v in a[rank]]
        for r in range(n):
            if r != rank and a[r][col] % p != 0:
                f = a[r][col]
                a[r] = [(a[r][c] - f * a[rank][c]) % p for c in range(n)]
        rank += 1
    return rank


def det_mod_p(matrix: RingMatrix, morphism: FieldMorphism) -> int:
    """Determinant of the mapped matrix over F_p."""
    a = [[int(v) for v in row] for row in matrix.map_mod_p(morphism)]
    p = morphism.p
    n = len(a)
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] % p != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = (-det) % p
        det = (det * a[col][col]) % p
        inv = pow(a[col][col], -1, p)
        for r in range(col + 1, n):
            if a[r][col] % p != 0:
                f = (a[r][col] * inv) % p
                a[r] = [(a[r][c] - f * a[col][c]) % p for c in range(n)]
    return det % p


def default_morphism(ring: RingSpec) -> FieldMorphism:
    """Stock quotient map: F_5 for the Gaussian integers, F_7 for Eisenstein."""
    if ring.d == 1:
        return morphism_new(ring, ring.elem(2, 1))
    if ring.d == 3:
        return morphism_new(ring, ring.elem(2, 1))
    raise ValueError(
        f"no default morphism for d={ring.d}; supply a modulus of prime norm"
    )


def transmission_rate(designs: list, morphism: FieldMorphism) -> NetworkDesign:
    """Pick the candidate coefficient matrix with the best min-over-relays rate.

    Each candidate matrix assigns its column l to relay l.  Candidates that are
    rank-deficient over F_p are discarded; for unimodular candidates this never
    happens, and the determinant-morphism commutation f(det A) = det f(A) is
    checked on the chosen matrix.
    """
    if not designs:
        raise ValueError("need at least one relay design")
    n = designs[0].channel.n
    if any(d.channel.n != n for d in designs):
        raise ValueError("relay designs have mismatched sizes")

    if all(d.matrix is not None for d in designs):
        candidates = [d.matrix for d in designs]
    elif all(d.matrix is None and len(d.vectors) == 1 for d in designs):
        if len(designs) != n:
            raise ValueError("single-equation designs need one relay per dimension")
        candidates = [
            RingMatrix.from_columns([d.best_vector for d in designs], designs[0].ring)
        ]
    else:
        raise ValueError("mixed candidate kinds; use one strategy per network")

    rates = []
    ranks = []
    for cand in candidates:
        r = min(
            computation_rate(designs[l].channel, cand.column(l)) for l in range(n)
        )
        rates.append(r)
        ranks.append(rank_mod_p(cand, morphism))

    usable = [i for i in range(len(candidates)) if ranks[i] == n]
    if not usable:
        raise ValueError("every candidate matrix is rank-deficient over F_p")
    chosen = max(usable, key=lambda i: rates[i])
    A = candidates[chosen]
    commutes = morphism.apply(A.det()) == det_mod_p(A, morphism)
    return NetworkDesign(candidates, chosen, rates[chosen], True, commutes)


# ---------------------------------------------------------------------------
# experiment-level operations


def dof_slope(
    ring: RingSpec,
    n: int,
    strategy: str,
    p_grid_db,
    channels_per_point: int = 200,
    seed: int = 0,
) -> float:
    """Least-squares slope of the mean computation rate vs log2(1 + P)."""
    p_grid_db = list(p_grid_db)
    if len(p_grid_db) < 2 or max(p_grid_db) - min(p_grid_db) < 30:
        raise ValueError("the SNR grid must span at least 30 dB")
    ss = np.random.SeedSequence(seed)
    means = []
    xs = []
    for p_db, child in zip(p_grid_db, ss.spawn(len(p_grid_db))):
        rng = np.random.default_rng(child)
        p_lin = db_to_linear(p_db)
        acc = 0.0
        for _ in range(channels_per_point):
            ch = random_channel(n, p_lin, rng)
            acc += design_relay(ch, ring, strategy).best_rate
        means.append(acc / channels_per_point)
        xs.append(math.log2(1.0 + p_lin))
    slope = np.polyfit(xs, means, 1)[0]
    return float(slope)


def rank_failure_probability(
    ring: RingSpec,
    morphism: FieldMorphism,
    n: int,
    p_linear: float,
    trials: int,
    strategy: str = "best_single",
    seed: int = 0,
):
    """Fractions of trials whose stacked coefficient matrix is singular over
    the ring and over F_p, respectively.

    best_single stacks each relay's single best equation; the unimodular
    (alll) scheme picks a whole unimodular matrix and never fails.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    ring_fail = 0
    field_fail = 0
    for _ in range(trials):
        designs = [
            design_relay(random_channel(n, p_linear, rng), ring, strategy)
            for _ in range(n)
        ]
        if strategy == "alll":
            A = transmission_rate(designs, morphism).chosen_matrix
        else:
            A = RingMatrix.from_columns([d.best_vector for d in designs], ring)
            if A.det().is_zero():
                ring_fail += 1
                field_fail += 1
                continue
        if rank_mod_p(A, morphism) < n:
            field_fail += 1
    return ring_fail / trials, field_fail / trials


def mac_rate_floor(ring: RingSpec, ch: Channel, delta: float = 0.99) -> float:
    """Lower bound on the best rate: the per-user MAC capacity share minus the
    ring- and reduction-dependent constant."""
    n = ch.n
    eps = reduction_epsilon(ring, delta)
    gamma = hermite_constant_2n(n)
    if gamma is None or eps <= 0:
        raise ValueError("no bound available for this ring/dimension")
    cap = max(0.0, math.log2(1.0 + ch.p * float(np.linalg.norm(ch.h)) ** 2)) / n
    penalty = max(0.0, math.log2(eps ** (-(n - 1)) * gamma * ring.det_phi))
    return cap - penalty
