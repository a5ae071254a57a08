"""Truncation towers for countable graphs and compact spectra.

The target set is given as an enumerated dense sequence ``lambda_1,
lambda_2, ...``. Level ``n`` of the tower is a solution ``Ã_n`` on the first
``n`` vertices with spectrum ``{lambda_1..lambda_n}``, and consecutive levels
satisfy ``||Ã_n ⊕ [lambda_{n+1}] - Ã_{n+1}||_op < 2**-n``. Padding level ``N``
with the diagonal tail ``lambda_{N+1}, ...`` gives an operator ``T_N`` within
``2**-(N-1)`` of the limit, so its spectrum is a certified approximation.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DuplicateEigenvalues, SequenceExhausted
from .finite import SolveOptions, grow
from .graph import LowerAdjacencyStream, induced_prefix, validate_pattern
from .linalg import direct_sum, eigenvalues, hausdorff_distance, operator_norm

SEQUENCE_FAMILIES = ("harmonic", "harmonic0", "dyadic", "clusters", "file")
EQUIVALENT = "approximately unitarily equivalent"
NOT_SHOWN = "not shown to be approximately unitarily equivalent"


@dataclass(frozen=True)
class DenseSequenceSpec:
    """An enumeration of a countable dense subset of a compact set.

    ``harmonic``   1, 1/2, 1/3, ...              (closure adds 0)
    ``harmonic0``  0, 1, 1/2, 1/3, ...
    ``dyadic``     a, b, then dyadic points of [a, b] level by level,
                   bit-reversed within a level (van der Corput order)
    ``clusters``   round robin over ``limits`` c_j: c_j + width/(k+1)
    ``file``       explicit finite list ``values``
    """

    family: str
    a: float = 0.0
    b: float = 1.0
    limits: tuple = ()
    width: float = 0.1
    values: tuple = ()

    def __post_init__(self):
        if self.family not in SEQUENCE_FAMILIES:
            raise ValueError(f"unknown sequence family {self.family!r}; choose from {SEQUENCE_FAMILIES}")
        if self.family == "dyadic" and not self.a < self.b:
            raise ValueError("dyadic family needs a < b")
        if self.family == "clusters":
            if not self.limits or self.width <= 0:
                raise ValueError("clusters family needs limits and a positive width")
            lim = sorted(self.limits)
            if len(lim) > 1 and min(np.diff(lim)) <= self.width:
                raise ValueError("cluster limits must be more than width apart")

    @property
    def bound(self):
        if self.family in ("harmonic", "harmonic0"):
            return 1.0
        if self.family == "dyadic":
            return max(abs(self.a), abs(self.b))
        if self.family == "clusters":
            return max(abs(c) for c in self.limits) + self.width
        return max((abs(v) for v in self.values), default=0.0)

    @property
    def declared_limit_points(self):
        if self.family in ("harmonic", "harmonic0"):
            return (0.0,)
        if self.family == "clusters":
            return tuple(float(c) for c in self.limits)
        return None

    def term(self, i):
        """Zero-based term ``i``."""
        f = self.family
        if f == "harmonic":
            return 1.0 / (i + 1)
        if f == "harmonic0":
            return 0.0 if i == 0 else 1.0 / i
        if f == "dyadic":
            if i < 2:
                return float(self.a if i == 0 else self.b)
            idx = i - 2
            level = (idx + 1).bit_length()
            t = idx - (2 ** (level - 1) - 1)
            # van der Corput order inside a level keeps partial levels spread out
            j = 2 * int(format(t, f"0{level - 1}b")[::-1] or "0", 2) + 1
            return self.a + (self.b - self.a) * j / 2.0 ** level
        if f == "clusters":
            m = len(self.limits)
            return float(self.limits[i % m]) + self.width / (i // m + 1)
        if i >= len(self.values):
            raise SequenceExhausted(f"sequence file has {len(self.values)} terms, need term {i + 1}")
        return float(self.values[i])

    def terms(self, start, count, *, partial=False):
        out = []
        for i in range(start, start + count):
            try:
                out.append(self.term(i))
            except SequenceExhausted:
                if partial:
                    break
                raise
        return out

    def to_json(self):
        d = {"family": self.family}
        if self.family == "dyadic":
            d.update(a=self.a, b=self.b)
        elif self.family == "clusters":
            d.update(limits=list(self.limits), width=self.width)
        elif self.family == "file":
            d.update(values=list(self.values))
        d["bound"] = self.bound
        d["declared_limit_points"] = None if self.declared_limit_points is None else list(self.declared_limit_points)
        return d

    @classmethod
    def from_json(cls, d):
        return cls(
            d["family"],
            a=d.get("a", 0.0),
            b=d.get("b", 1.0),
            limits=tuple(d.get("limits", ())),
            width=d.get("width", 0.1),
            values=tuple(d.get("values", ())),
        )


@dataclass
class TruncationTower:
    sequence: DenseSequenceSpec
    stream: LowerAdjacencyStream
    lambdas: list
    matrices: list
    records: list
    options: SolveOptions = field(default_factory=SolveOptions)

    @property
    def levels(self):
        return len(self.matrices)

    @property
    def step_norm_deltas(self):
        return [r.achieved_norm_delta for r in self.records]

    @property
    def budgets(self):
        return [r.budget for r in self.records]

    def padded(self, n, order):
        """``Ã_n ⊕ diag(lambda_{n+1} .. lambda_order)``: level ``n`` of ``T`` cut to ``order``."""
        return direct_sum(self.matrices[n - 1], np.diag(self.lambdas[n:order]))


def build_tower(stream, sequence, levels, options=None):
    """Solve the prefixes ``G[0..n-1]`` for ``n = 1..levels``, each from the previous one.

    Each step's budget is ``2**-n`` (capped by ``options.epsilon``) and is
    checked against the operator norm of the actual difference.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    opts = options or SolveOptions()
    lam = sequence.terms(0, levels + 1)
    matrices = []
    records = []
    for a, rec in grow(lam[:levels], stream.neighbors, opts):
        matrices.append(a)
        if rec is not None:
            records.append(rec)
    if lam[levels] in lam[:levels]:
        raise DuplicateEigenvalues(f"sequence term {levels + 1} repeats an earlier term")
    return TruncationTower(sequence, stream, lam[:levels], matrices, records, opts)


@dataclass(frozen=True)
class SpectralCertificate:
    level: int
    eigenvalues: np.ndarray
    tail: tuple
    tail_bound: float

    @property
    def approx_spectrum(self):
        return np.sort(np.concatenate([self.eigenvalues, np.asarray(self.tail, dtype=np.float64)]))

    @property
    def statement(self):
        return (
            f"d_H(sigma(T), sigma(T_{self.level})) <= {self.tail_bound!r}; "
            f"sigma(T_{self.level}) is represented by sigma(Ã_{self.level}) and {len(self.tail)} sampled tail terms, "
            "so the bound refers to the sampled set, not to the full compact set"
        )

    def to_json(self):
        return {
            "level": self.level,
            "tail_bound": self.tail_bound,
            "eigenvalues": list(map(float, self.eigenvalues)),
            "tail_sample_size": len(self.tail),
            "statement": self.statement,
        }


def tail_bound(level):
    """``sum_{k >= level} 2**-k``."""
    return 2.0 ** -(level - 1)


def certify_spectrum(tower, tail_sample=None):
    """Spectrum of ``T_N`` (eigenvalues of ``Ã_N`` plus ``tail_sample`` tail terms) and its distance bound.

    ``tail_sample`` defaults to ``10 * N``. Finite sequences contribute as
    many tail terms as they have.
    """
    n = tower.levels
    m = 10 * n if tail_sample is None else int(tail_sample)
    tail = tower.sequence.terms(n, m, partial=True)
    return SpectralCertificate(n, eigenvalues(tower.matrices[-1]), tuple(tail), tail_bound(n))


def limit_points(sample, delta, cluster_min=5, spacing_ratio=4.0):
    """Estimate the accumulation points of a finite sample at resolution ``delta``.

    A point is crowded when at least ``cluster_min`` other sample points lie
    within ``delta`` of it. Crowded points chained by gaps below ``delta``
    form clusters. Inside a cluster the sample accumulates where its local
    spacing is finest, so only points whose spacing is within
    ``spacing_ratio`` of the cluster's finest are kept: a sequence converging
    to ``c`` keeps a short stretch next to ``c``, a dense interval keeps all
    of itself. Kept points are averaged over consecutive windows of width
    ``delta``; the returned representatives are at least ``delta`` apart.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    s = np.unique(np.asarray(sample, dtype=np.float64).ravel())
    if s.size == 0:
        return []
    lo = np.searchsorted(s, s - delta, "left")
    hi = np.searchsorted(s, s + delta, "right")
    crowded = s[(hi - lo - 1) >= cluster_min]
    if crowded.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(crowded) >= delta) + 1
    half = max(1, cluster_min // 2)
    reps = []
    for cluster in np.split(crowded, breaks):
        i = np.searchsorted(s, cluster)
        left = s[np.clip(i - half, 0, s.size - 1)]
        right = s[np.clip(i + half, 0, s.size - 1)]
        span = (right - left) / (np.clip(i + half, 0, s.size - 1) - np.clip(i - half, 0, s.size - 1))
        keep = cluster[span <= spacing_ratio * span.min()]
        start = 0
        while start < keep.size:
            stop = np.searchsorted(keep, keep[start] + delta, "left")
            v = float(keep[start:stop].mean())
            if not reps or v - reps[-1] >= delta:
                reps.append(v)
            start = stop
    return reps


@dataclass(frozen=True)
class SpectralFingerprint:
    essential_spectrum_estimate: tuple
    isolated_points: tuple
    unresolved: int
    delta: float
    window: float

    @property
    def compact_tail(self):
        """One limit point ``c``: ``T - cI`` is then compact."""
        return len(self.essential_spectrum_estimate) == 1

    def to_json(self):
        return {
            "essential_spectrum_estimate": list(self.essential_spectrum_estimate),
            "isolated_points": [[v, m] for v, m in self.isolated_points],
            "unresolved": self.unresolved,
            "delta": self.delta,
            "window": self.window,
            "compact_tail": self.compact_tail,
        }

    @classmethod
    def from_json(cls, d):
        return cls(
            tuple(d["essential_spectrum_estimate"]),
            tuple((float(v), int(m)) for v, m in d["isolated_points"]),
            int(d["unresolved"]),
            float(d["delta"]),
            float(d["window"]),
        )


def fingerprint(tower, delta=None, tail_sample=None, certificate=None):
    """Essential spectrum estimate plus isolated eigenvalues with multiplicities.

    The essential part is ``limit_points`` of the certified spectrum at
    resolution ``delta`` (default twice the tail bound). Each sequence term
    farther than ``delta`` from it, and separated from every other term by
    more than twice the window ``tail_bound + delta/2``, is an isolated
    point; its multiplicity is the number of eigenvalues of ``T_N`` inside
    the window. Terms too crowded to resolve are only counted.
    """
    cert = certificate or certify_spectrum(tower, tail_sample)
    delta = 2.0 * cert.tail_bound if delta is None else float(delta)
    window = cert.tail_bound + 0.5 * delta
    approx = cert.approx_spectrum
    ess = limit_points(approx, delta)
    targets = np.sort(np.asarray(list(tower.lambdas) + list(cert.tail), dtype=np.float64))
    isolated = []
    unresolved = 0
    for i, x in enumerate(targets):
        if ess and min(abs(x - e) for e in ess) <= delta:
            continue
        gaps = []
        if i > 0:
            gaps.append(x - targets[i - 1])
        if i + 1 < targets.size:
            gaps.append(targets[i + 1] - x)
        if gaps and min(gaps) <= 2.0 * window:
            unresolved += 1
            continue
        mult = int(np.sum(np.abs(approx - x) <= window))
        isolated.append((float(x), mult))
    return SpectralFingerprint(tuple(ess), tuple(isolated), unresolved, delta, window)


def compare_fingerprints(fp1, fp2, tol=None):
    """Verdict on approximate unitary equivalence from two fingerprints.

    Both conditions must match within ``tol`` (default the larger
    resolution): the essential spectrum estimates, and the isolated points
    with their multiplicities.
    """
    tol = max(fp1.delta, fp2.delta) if tol is None else tol
    reasons = []
    e1, e2 = fp1.essential_spectrum_estimate, fp2.essential_spectrum_estimate
    if bool(e1) != bool(e2) or (e1 and hausdorff_distance(e1, e2) > tol):
        reasons.append(f"essential spectra differ: {list(e1)} vs {list(e2)}")
    i1, i2 = fp1.isolated_points, fp2.isolated_points
    if len(i1) != len(i2):
        reasons.append(f"{len(i1)} vs {len(i2)} isolated points")
    else:
        for (v1, m1), (v2, m2) in zip(i1, i2):
            if abs(v1 - v2) > tol or m1 != m2:
                reasons.append(f"isolated point {v1!r} (multiplicity {m1}) vs {v2!r} (multiplicity {m2})")
    return (EQUIVALENT if not reasons else NOT_SHOWN), reasons


def telescoping_gap(tower, n):
    """``||Ã_N - Ã_n ⊕ diag(lambda_{n+1}..lambda_N)||_op`` and the geometric bound on it."""
    big = tower.levels
    diff = tower.matrices[-1] - tower.padded(n, big)
    bound = math.fsum(2.0 ** -k for k in range(n, big))
    return operator_norm(diff), bound


def check_tower(tower):
    """Recheck a tower's recorded claims; return a list of violation messages."""
    problems = []
    for rec in tower.records:
        k = rec.step_index
        if not rec.achieved_norm_delta < 2.0 ** -k:
            problems.append(f"level {k}: delta {rec.achieved_norm_delta!r} not below 2^-{k}")
        if not rec.wsp.holds:
            problems.append(f"level {k + 1}: WSP not certified")
    for n, a in enumerate(tower.matrices, start=1):
        rep = validate_pattern(a, induced_prefix(tower.stream, n), tower.options.edge_floor)
        if not rep.ok:
            problems.append(f"level {n}: " + "; ".join(rep.violations))
    return problems
