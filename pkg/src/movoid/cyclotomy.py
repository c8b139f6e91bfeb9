"""Cyclotomic classes and exact additive character sums.

A character sum  sum_{x in S} w^Tr(x)  (w a primitive p-th root of unity) is
kept as the histogram of absolute trace values over S. Since
1, w, ..., w^(p-2) are linearly independent and the p powers of w sum to
zero, the sum is a rational integer exactly when all non-zero trace values
occur equally often, and then it equals n_0 - n_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import kernels
from .errors import BadParameters, LogOfZero, NonIntegralPeriod
from .gf import ZERO, Field, FieldElement


@dataclass(frozen=True)
class TraceCountVector:
    counts: tuple[int, ...]

    @property
    def p(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return sum(self.counts)

    def __add__(self, other: TraceCountVector) -> TraceCountVector:
        return TraceCountVector(tuple(a + b for a, b in zip(self.counts, other.counts)))

    def as_integer(self) -> Optional[int]:
        return as_integer(self)


def as_integer(v: TraceCountVector) -> Optional[int]:
    """Integer value of the character sum, or None if it is not rational."""
    tail = v.counts[1:]
    if any(c != tail[0] for c in tail):
        return None
    return v.counts[0] - tail[0]


@dataclass(frozen=True)
class ExponentSet:
    N: int
    members: frozenset

    def __post_init__(self):
        object.__setattr__(self, "members", frozenset(int(i) % self.N for i in self.members))

    @classmethod
    def of(cls, N: int, members: Iterable[int]) -> ExponentSet:
        return cls(N, frozenset(members))

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, i):
        return (i % self.N) in self.members

    def is_proper(self) -> bool:
        return 0 < len(self.members) < self.N

    def shifted(self, k: int) -> ExponentSet:
        return ExponentSet.of(self.N, (i + k for i in self.members))

    def negated(self) -> ExponentSet:
        return ExponentSet.of(self.N, (-i for i in self.members))

    def sorted(self) -> list[int]:
        return sorted(self.members)


def semiprimitive_ell(p: int, N: int) -> Optional[int]:
    """Smallest l >= 1 with p^l = -1 (mod N), or None."""
    if N <= 2:
        return 1 if N == 2 and p % 2 else None
    x = 1
    for ell in range(1, N + 1):
        x = x * p % N
        if x == N - 1:
            return ell
        if x == 1:
            return None
    return None


class CyclotomicSystem:
    """The N-th cyclotomic classes of a field."""

    def __init__(self, field: Field, N: int):
        if N <= 1 or field.order % N:
            raise BadParameters(f"N={N} must be > 1 and divide q-1={field.order}")
        self.field = field
        self.N = N
        self.class_size = field.order // N
        self.ell = semiprimitive_ell(field.p, N)

    @property
    def semiprimitive(self) -> bool:
        return self.ell is not None

    def class_of(self, x: FieldElement) -> int:
        if x.index == ZERO:
            raise LogOfZero("zero lies in no cyclotomic class")
        return x.index % self.N

    def class_logs(self, i: int) -> np.ndarray:
        return np.arange(self.class_size, dtype=np.int64) * self.N + (i % self.N)

    def union_logs(self, J: Iterable[int]) -> np.ndarray:
        J = sorted({int(i) % self.N for i in J})
        if not J:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([self.class_logs(i) for i in J])

    def coset_sums(self, J: Iterable[int], shifts=None) -> list[TraceCountVector]:
        """psi(gamma^i D_J) for each shift i (default: all residues mod N)."""
        if shifts is None:
            shifts = range(self.N)
        logs = self.union_logs(J)
        return char_sums_logs(self.field, logs, list(shifts))

    def __repr__(self):
        return f"CyclotomicSystem({self.field!r}, N={self.N})"


def class_of(x: FieldElement, sys: CyclotomicSystem) -> int:
    return sys.class_of(x)


def char_sums_logs(field: Field, logs, shifts) -> list[TraceCountVector]:
    """Trace histograms of gamma^shift * {gamma^k : k in logs}, per shift."""
    hist = kernels.trace_histograms(field.abs_trace_by_log, np.asarray(logs, dtype=np.int64),
                                    np.asarray(shifts, dtype=np.int64), field.p)
    return [TraceCountVector(tuple(int(c) for c in row)) for row in hist]


def char_sum(S: Iterable[FieldElement], field: Optional[Field] = None) -> TraceCountVector:
    """Exact psi(S) for a finite set of field elements."""
    S = list(S)
    if field is None:
        if not S:
            raise BadParameters("field required for an empty set")
        field = S[0].field
    logs = np.array([x.index for x in S if x.index != ZERO], dtype=np.int64)
    zeros = len(S) - len(logs)
    if len(logs):
        v = char_sums_logs(field, logs, [0])[0]
    else:
        v = TraceCountVector((0,) * field.p)
    counts = list(v.counts)
    counts[0] += zeros
    return TraceCountVector(tuple(counts))


def gauss_periods(sys: CyclotomicSystem) -> list[int]:
    out = []
    for i in range(sys.N):
        v = char_sums_logs(sys.field, sys.class_logs(i), [0])[0]
        value = as_integer(v)
        if value is None:
            raise NonIntegralPeriod(
                f"period of class {i} is not a rational integer: counts {v.counts}")
        out.append(value)
    return out


@dataclass(frozen=True)
class SpectrumPrediction:
    p: int
    ell: int
    t: int
    N: int
    u: int
    k: int
    alpha1: int
    alpha2: int
    eps: int

    @property
    def s(self) -> int:
        return 2 * self.ell * self.t

    @property
    def q(self) -> int:
        return self.p**self.s

    @property
    def t_parity(self) -> int:
        return self.t % 2

    @property
    def eps_power(self) -> int:
        return self.eps**self.s

    @property
    def negative_latin(self) -> bool:
        return self.t % 2 == 0


def predicted_spectrum(p: int, ell: int, t: int, u: int, N: Optional[int] = None) -> SpectrumPrediction:
    """Eigenvalues of Cay(F_q, D_J) for |J| = u in the semiprimitive case.

    N defaults to p^ell + 1; any other N must satisfy p^ell = -1 (mod N) with
    ell minimal.
    """
    if ell < 1 or t < 1:
        raise BadParameters("ell and t must be positive")
    N = p**ell + 1 if N is None else N
    q = p ** (2 * ell * t)
    if N <= 1 or (q - 1) % N:
        raise BadParameters(f"N={N} does not divide q-1")
    if p % 2 and ((q - 1) // 2) % N:
        raise BadParameters(f"N={N} does not divide (q-1)/2")
    if semiprimitive_ell(p, N) != ell:
        raise BadParameters(f"ell={ell} is not the least l with {p}^l = -1 mod {N}")
    if not 1 <= u < N:
        raise BadParameters(f"u={u} must satisfy 1 <= u < N={N}")
    root = p ** (ell * t)
    sign = -1 if t % 2 else 1
    num = u * (-1 + sign * root)
    if num % N:
        raise BadParameters("non-integral eigenvalue")
    alpha1 = num // N
    alpha2 = alpha1 - sign * root
    eps = -1 if N % 2 == 0 and ((p**ell + 1) // N) % 2 == 1 else 1
    return SpectrumPrediction(p=p, ell=ell, t=t, N=N, u=u, k=(q - 1) // N * u,
                              alpha1=alpha1, alpha2=alpha2, eps=eps)


def dual_exponents(J: ExponentSet, pred: SpectrumPrediction) -> ExponentSet:
    """Residues i with psi(gamma^i D_J) = alpha2."""
    dual = J.negated()
    if pred.eps_power == -1:
        dual = dual.shifted(J.N // 2)
    return dual
