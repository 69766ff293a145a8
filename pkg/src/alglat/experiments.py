"""Seeded Monte-Carlo harnesses with deterministic CSV output.

Every experiment derives one child seed per trial from the master seed, so
results are bit-identical however the trials are scheduled.  Complex Gaussian
channels use two independent N(0, 1/2) components per entry.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cf import (
    db_to_linear,
    default_morphism,
    design_relay,
    rank_failure_probability,
    rank_mod_p,
    random_channel,
    transmission_rate,
)
from .lattices import ComplexBasis, RingMatrix, volume
from .reduction import NonEuclideanRingWarning, gauss_reduce
from .rings import RingSpec, morphism_new
from .svp import shortest_vector

__all__ = [
    "hermite_cdf",
    "hermite_cdf_rows",
    "cf_experiment",
    "rank_failure_rows",
    "write_csv",
    "HERMITE_CSV_HEADER",
    "CF_CSV_HEADER",
    "RANK_CSV_HEADER",
]

HERMITE_CSV_HEADER = ["ring", "index", "hermite_factor"]
CF_CSV_HEADER = [
    "strategy",
    "snr_db",
    "trials",
    "mean_rate",
    "std_rate",
    "mean_swaps",
    "mean_first_norm",
    "p_rank_fail_ring",
    "p_rank_fail_field",
]
RANK_CSV_HEADER = ["strategy", "snr_db", "trials", "p_rank_fail_ring", "p_rank_fail_field"]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".10g")
    return str(x)


def write_csv(rows, header, out) -> None:
    """Write rows with a fixed float format so equal inputs give equal bytes."""
    close = False
    if isinstance(out, (str, bytes)):
        out = open(out, "w", newline="")
        close = True
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    finally:
        if close:
            out.close()


# ---------------------------------------------------------------------------
# Hermite factor CDF


def hermite_cdf(rings, trials: int, seed: int, n: int = 2) -> dict:
    """Sorted Hermite factors of random rank-2 lattices, one array per ring.

    Bases have i.i.d. CN(0,1) entries; lambda1 comes from Gauss reduction on
    norm-Euclidean rings and from the enumeration oracle otherwise.
    """
    if n != 2:
        raise ValueError("the Hermite CDF experiment is defined for rank 2")
    if trials < 100:
        raise ValueError(f"need at least 100 trials for a meaningful CDF, got {trials}")
    out = {}
    ss = np.random.SeedSequence(seed)
    for ring, child in zip(rings, ss.spawn(len(rings))):
        rng = np.random.default_rng(child)
        vals = np.empty(trials)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonEuclideanRingWarning)
            for t in range(trials):
                m = math.sqrt(0.5) * (
                    rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                )
                basis = ComplexBasis(m, ring)
                if ring.euclidean:
                    lam1 = gauss_reduce(m[:, 0], m[:, 1], ring).norms[0]
                else:
                    lam1 = shortest_vector(basis).norm
                vals[t] = lam1**2 / math.sqrt(volume(basis))
        vals.sort()
        out[ring] = vals
    return out


def hermite_cdf_rows(rings, trials: int, seed: int):
    data = hermite_cdf(rings, trials, seed)
    rows = []
    for ring, vals in data.items():
        for i, v in enumerate(vals):
            rows.append([f"d={ring.d}", i, float(v)])
    return rows


# ---------------------------------------------------------------------------
# compute-and-forward experiment


@dataclass
class _Acc:
    rates: list
    swaps: list
    norms: list
    ring_fail: int = 0
    field_fail: int = 0
    fail_trials: int = 0


def _resolve_morphism(ring: RingSpec, modulus):
    if modulus is not None:
        return morphism_new(ring, ring.elem(*modulus))
    try:
        return default_morphism(ring)
    except ValueError:
        return None


def cf_experiment(
    ring: RingSpec,
    n: int,
    snr_db_list,
    trials: int,
    strategies,
    seed: int,
    modulus=None,
):
    """Network trials per (strategy, SNR): rates, swap counts, rank failures.

    Each trial draws one n-relay network; the same channels are replayed for
    every strategy so the comparison columns are paired.  Rank failure uses
    the chosen unimodular matrix for the alll strategy and the stack of
    per-relay best equations otherwise; field-rank columns are empty when the
    ring has no default morphism and none is supplied.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    for s in strategies:
        if s not in ("alll", "rlll", "svp", "best_single"):
            raise ValueError(f"unknown strategy {s!r}")
    morphism = _resolve_morphism(ring, modulus)
    snr_db_list = list(snr_db_list)
    acc = {(s, pi): _Acc([], [], []) for s in strategies for pi in range(len(snr_db_list))}
    ss = np.random.SeedSequence(seed)
    children = ss.spawn(len(snr_db_list) * trials)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonEuclideanRingWarning)
        for pi, p_db in enumerate(snr_db_list):
            p_lin = db_to_linear(p_db)
            for t in range(trials):
                rng = np.random.default_rng(children[pi * trials + t])
                chans = [random_channel(n, p_lin, rng) for _ in range(n)]
                for s in strategies:
                    designs = [design_relay(ch, ring, s) for ch in chans]
                    a = acc[(s, pi)]
                    a.rates.extend(d.best_rate for d in designs)
                    a.swaps.extend(d.swaps for d in designs)
                    a.norms.extend(d.first_norm for d in designs)
                    a.fail_trials += 1
                    if s == "alll" and morphism is not None:
                        nd = transmission_rate(designs, morphism)
                        A = nd.chosen_matrix
                    else:
                        A = RingMatrix.from_columns(
                            [d.best_vector for d in designs], ring
                        )
                    if A.det().is_zero():
                        a.ring_fail += 1
                        a.field_fail += 1
                    elif morphism is not None and rank_mod_p(A, morphism) < n:
                        a.field_fail += 1
    rows = []
    for s in strategies:
        for pi, p_db in enumerate(snr_db_list):
            a = acc[(s, pi)]
            rows.append(
                [
                    s,
                    float(p_db),
                    trials,
                    float(np.mean(a.rates)),
                    float(np.std(a.rates)),
                    float(np.mean(a.swaps)),
                    float(np.mean(a.norms)),
                    a.ring_fail / a.fail_trials,
                    (a.field_fail / a.fail_trials) if morphism is not None else None,
                ]
            )
    return rows


def rank_failure_rows(ring, morphism, n, snr_db, trials, strategy, seed):
    p_ring, p_field = rank_failure_probability(
        ring, morphism, n, db_to_linear(snr_db), trials, strategy, seed
    )
    return [[strategy, float(snr_db), trials, p_ring, p_field]]
