"""m-ovoids from unions of cyclotomic classes.

With N = p^l + 1, t even and s = 2lt = 2er, the point set of D_J is an
m-ovoid of W(2r-1, p^e) whenever J is a union of orbits of the dihedral
group generated by rho: i -> i + 2 d0 and sigma: i -> -1 - i on Z_N, where
d0 = gcd(N/2, (sqrt(q)-1)/(p^e-1)). Each orbit contributes
m = (sqrt(q)-1)/(d0 (p^e-1)).

Everything here except ``build_candidate`` is exact big-integer arithmetic
and never builds a field.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .cyclotomy import CyclotomicSystem, ExponentSet
from .errors import BadParameters, BOutOfRange, D0NotGreaterThanOne
from .gf import MAX_ORDER, is_prime
from .symplectic import SymplecticSpace, make_space


def compute_d0(p: int, ell: int, t: int, e: int, check_odd: bool = True) -> int:
    if t % 2:
        raise BadParameters(f"t={t} must be even")
    if e < 1 or (ell * t) % e:
        raise BadParameters(f"e={e} must divide l*t={ell * t}")
    N = p**ell + 1
    root = p ** (ell * t)
    d0 = math.gcd(N // 2, (root - 1) // (p**e - 1))
    if check_odd and d0 % 2 == 0:
        warnings.warn(f"d0={d0} is even for p={p}, l={ell}, t={t}, e={e}")
    return d0


@dataclass(frozen=True)
class OrbitDecomposition:
    N: int
    d0: int
    orbits: tuple

    def __post_init__(self):
        seen = sorted(i for o in self.orbits for i in o)
        if seen != list(range(self.N)):
            raise AssertionError("orbits do not partition Z_N")


def dihedral_orbits(N: int, d0: int) -> OrbitDecomposition:
    """Orbits of <rho, sigma> on Z_N, sorted by least element."""
    if d0 < 1 or (N // 2) % d0 or N % 2:
        raise BadParameters(f"d0={d0} must divide N/2={N // 2}")
    seen = set()
    orbits = []
    for start in range(N):
        if start in seen:
            continue
        orbit = {start}
        todo = [start]
        while todo:
            i = todo.pop()
            for j in ((i + 2 * d0) % N, (-1 - i) % N):
                if j not in orbit:
                    orbit.add(j)
                    todo.append(j)
        seen |= orbit
        orbits.append(tuple(sorted(orbit)))
    return OrbitDecomposition(N, d0, tuple(orbits))


def odd_divisors(n: int, minimum: int = 3) -> list[int]:
    return [d for d in range(minimum, n + 1) if n % d == 0 and d % 2]


@dataclass(frozen=True)
class ConstructionParams:
    p: int
    ell: int
    t: int
    r: int
    b: int = 1
    orbits: Optional[tuple] = None

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise BadParameters(f"p={self.p} must be an odd prime")
        if self.t < 2 or self.t % 2:
            raise BadParameters(f"t={self.t} must be even")
        if self.r < 3 or self.r % 2 == 0:
            raise BadParameters(f"r={self.r} must be odd and at least 3")
        if (self.ell * self.t) % self.r:
            raise BadParameters(f"r={self.r} must divide l*t={self.ell * self.t}")

    @classmethod
    def resolve(cls, p, ell=None, t=None, e=None, r=None, b=1, orbits=None):
        """Accept either the (l, t) or the (e, r) parameter style.

        (l, t) alone picks the unique odd r >= 3 dividing lt; (e, r) alone
        takes t = 2 and l = er/2.
        """
        if ell is not None or t is not None:
            if ell is None or t is None:
                raise BadParameters("both l and t are required")
            if e is not None:
                raise BadParameters("give either (l, t) or (e, r), not both")
            if r is None:
                choices = odd_divisors(ell * t)
                if len(choices) != 1:
                    raise BadParameters(
                        f"rank is ambiguous for l*t={ell * t}: choose r from {choices}")
                r = choices[0]
        else:
            if e is None or r is None:
                raise BadParameters("give (l, t) or (e, r)")
            if (e * r) % 2:
                raise BadParameters("e*r must be even to write s = 2lt with t even")
            ell, t = e * r // 2, 2
        params = cls(p, ell, t, r, b, tuple(orbits) if orbits is not None else None)
        if e is not None and params.e != e:
            raise BadParameters(f"e={e} inconsistent with l*t/r={params.e}")
        return params

    @property
    def e(self) -> int:
        return self.ell * self.t // self.r

    @property
    def s(self) -> int:
        return 2 * self.ell * self.t

    @property
    def N(self) -> int:
        return self.p**self.ell + 1

    @property
    def root_q(self) -> int:
        return self.p ** (self.ell * self.t)

    @property
    def d0(self) -> int:
        return compute_d0(self.p, self.ell, self.t, self.e)

    @property
    def r_is_prime(self) -> bool:
        return is_prime(self.r)

    def m_value(self, b: Optional[int] = None) -> int:
        b = self.b if b is None else b
        num = b * (self.root_q - 1)
        den = self.d0 * (self.p**self.e - 1)
        if num % den:
            raise BadParameters("m is not an integer")
        return num // den


@dataclass
class OvoidCandidate:
    params: ConstructionParams
    space: SymplecticSpace
    cyclotomy: CyclotomicSystem
    decomposition: OrbitDecomposition
    orbit_indices: tuple
    J: ExponentSet
    M: np.ndarray
    m_claimed: int

    @property
    def D_size(self) -> int:
        return len(self.J) * self.cyclotomy.class_size

    def D_logs(self) -> np.ndarray:
        return self.cyclotomy.union_logs(self.J)

    @property
    def labels(self) -> list[str]:
        return [] if self.params.r_is_prime else ["field-reduction overlap possible"]


def select_orbits(decomp: OrbitDecomposition, b: int, explicit=None) -> tuple:
    if explicit is not None:
        idx = tuple(sorted(set(int(i) for i in explicit)))
        if any(i < 0 or i >= len(decomp.orbits) for i in idx):
            raise BOutOfRange(f"orbit indices must lie in [0, {len(decomp.orbits)})")
        if not 1 <= len(idx) <= decomp.d0 - 1:
            raise BOutOfRange(f"need 1 <= b <= d0-1 = {decomp.d0 - 1} orbits, got {len(idx)}")
        return idx
    if not 1 <= b <= decomp.d0 - 1:
        raise BOutOfRange(f"b={b} must satisfy 1 <= b <= d0-1 = {decomp.d0 - 1}")
    return tuple(range(b))


def build_candidate(params: ConstructionParams, max_order: int = MAX_ORDER,
                    space: Optional[SymplecticSpace] = None) -> OvoidCandidate:
    d0 = params.d0
    if d0 <= 1:
        raise D0NotGreaterThanOne(f"d0={d0}: no construction for these parameters")
    decomp = dihedral_orbits(params.N, d0)
    chosen = select_orbits(decomp, params.b, params.orbits)
    b = len(chosen)
    J = ExponentSet.of(params.N, (i for k in chosen for i in decomp.orbits[k]))
    if space is None:
        space = make_space(params.p, params.e, params.r, max_order)
    cyc = CyclotomicSystem(space.field, params.N)
    # residues of gamma^(jN + i) mod (q-1)/(p^e-1), i in J
    M = space.points_of_logs(cyc.union_logs(J))
    if b != params.b:
        params = ConstructionParams(params.p, params.ell, params.t, params.r, b, chosen)
    return OvoidCandidate(params=params, space=space, cyclotomy=cyc, decomposition=decomp,
                          orbit_indices=chosen, J=J, M=M, m_claimed=params.m_value(b))


# ---------------------------------------------------------------------------
# parameter reports

@dataclass
class CaseReport:
    p0: int
    p: int
    ell: int
    t: int
    e: int
    case: str
    d0: int
    applies: bool
    m_unit: Optional[int]
    d0_odd: bool
    notes: list = field(default_factory=list)

    def m_menu(self) -> list[int]:
        if not self.applies:
            return []
        return [b * self.m_unit for b in range(1, self.d0)]


def case_analysis(p0: int, p: int, ell: int, t: int) -> CaseReport:
    if (ell * t) % p0:
        raise BadParameters(f"p0={p0} does not divide l*t={ell * t}: no integer e")
    if t % 2:
        raise BadParameters(f"t={t} must be even")
    e = ell * t // p0
    d0 = compute_d0(p, ell, t, e, check_odd=False)
    notes = []
    if t % p0 == 0:
        case = "A"
        N = p**ell + 1
        if d0 != math.gcd(N, p0):
            notes.append(f"d0={d0} differs from gcd(N, p0)={math.gcd(N, p0)}")
    else:
        case = "B"
        if ell % p0:
            notes.append("p0 divides neither t nor l")
        if d0 <= 1:
            notes.append("case B with d0 = 1")
    if not is_prime(p0):
        notes.append("r is not prime: field-reduction overlap possible")
    root = p ** (ell * t)
    m_unit = (root - 1) // (d0 * (p**e - 1)) if d0 > 1 else None
    return CaseReport(p0=p0, p=p, ell=ell, t=t, e=e, case=case, d0=d0, applies=d0 > 1,
                      m_unit=m_unit, d0_odd=d0 % 2 == 1, notes=notes)


def conjecture_ratio(p: int, p0: int, t: int, ell0: int, b: int = 1) -> Fraction:
    """m / p^(e(p0-2)) for the case-B family l = l0 p0, e = l0 t."""
    if t % 2 or t % p0 == 0:
        raise BadParameters("case B needs t even and p0 not dividing t")
    if ell0 < 1 or b < 1:
        raise BadParameters("l0 and b must be positive")
    ell, e = ell0 * p0, ell0 * t
    d0 = compute_d0(p, ell, t, e, check_odd=False)
    if b > d0 - 1:
        raise BOutOfRange(f"b={b} exceeds d0-1={d0 - 1}")
    return Fraction(b * (p ** (e * p0) - 1), d0 * (p ** (e * (p0 - 1)) - p ** (e * (p0 - 2))))


def conjecture_m(p: int, p0: int, t: int, ell0: int, b: int = 1) -> int:
    ell, e = ell0 * p0, ell0 * t
    d0 = compute_d0(p, ell, t, e, check_odd=False)
    return b * (p ** (e * p0) - 1) // (d0 * (p**e - 1))


# ---------------------------------------------------------------------------
# printed tables, transcribed as data
#
# Each row: p0, p (None for the "p odd" row), l, t per k, printed d0,
# printed subfield exponent e per k, and the printed m/b as a function of
# (p, k). Entries are copied as printed, typos included.

@dataclass(frozen=True)
class TableRow:
    table: int
    index: int
    p0: int
    p: Optional[int]
    ell: int
    t_per_k: int
    d0: int
    e_per_k: int
    m_printed: Callable[[int, int], Fraction]
    b_max: int
    m_text: str


def _ratio(base, num_exp, den, den_exp, minus_one=True):
    def m(p, k):
        top = base ** num_exp(k) - (1 if minus_one else 0)
        return Fraction(top, den * (base ** den_exp(k) - 1))
    return m


TABLE_1 = [
    TableRow(1, 1, 3, None, 1, 6, 3, 2,
             lambda p, k: Fraction(p ** (4 * k) + p ** (2 * k) + 1, 3), 2,
             "b/3 (p^{4k}+p^{2k}+1)"),
    TableRow(1, 2, 5, 3, 2, 10, 5, 4, _ratio(3, lambda k: 20 * k, 5, lambda k: 4 * k), 4,
             "b(3^{20k}-1)/(5(3^{4k}-1))"),
    TableRow(1, 3, 5, 7, 2, 10, 5, 4,
             _ratio(7, lambda k: 20 * k - 1, 5, lambda k: 4 * k, minus_one=False), 4,
             "b(7^{20k-1})/(5(7^{4k}-1))"),
    TableRow(1, 4, 5, 13, 2, 10, 5, 4, _ratio(13, lambda k: 20 * k, 5, lambda k: 4 * k), 4,
             "b(13^{20k}-1)/(5(13^{4k}-1))"),
    TableRow(1, 5, 5, 17, 2, 10, 5, 4, _ratio(17, lambda k: 20 * k, 5, lambda k: 4 * k), 4,
             "b(17^{20k}-1)/(5(17^{4k}-1))"),
    TableRow(1, 6, 5, 19, 1, 10, 5, 2, _ratio(19, lambda k: 10 * k, 5, lambda k: 2 * k), 4,
             "b(19^{10k}-1)/(5(19^{2k}-1))"),
    TableRow(1, 7, 7, 3, 3, 14, 7, 6, _ratio(3, lambda k: 42 * k, 7, lambda k: 6 * k), 6,
             "b(3^{42k}-1)/(7(3^{6k}-1))"),
    TableRow(1, 8, 7, 5, 3, 14, 7, 6, _ratio(5, lambda k: 42 * k, 7, lambda k: 6 * k), 6,
             "b(5^{42k}-1)/(7(5^{6k}-1))"),
    TableRow(1, 9, 7, 13, 3, 14, 7, 6, _ratio(13, lambda k: 42 * k, 7, lambda k: 6 * k), 6,
             "b(13^{42k}-1)/(7(13^{6k}-1))"),
    TableRow(1, 10, 11, 7, 5, 22, 11, 10, _ratio(7, lambda k: 110 * k, 11, lambda k: 10 * k), 10,
             "b(7^{110k}-1)/(11(7^{10k}-1))"),
    TableRow(1, 11, 11, 13, 5, 22, 11, 10, _ratio(13, lambda k: 110 * k, 11, lambda k: 10 * k), 10,
             "b(13^{110k}-1)/(11(13^{10k}-1))"),
    TableRow(1, 12, 11, 17, 5, 22, 11, 10, _ratio(17, lambda k: 110 * k, 11, lambda k: 10 * k), 10,
             "b(17^{110k}-1)/(11(17^{10k}-1))"),
    TableRow(1, 13, 11, 19, 5, 22, 11, 10, _ratio(19, lambda k: 110 * k, 11, lambda k: 10 * k), 10,
             "b(19^{110k}-1)/(11(19^{10k}-1))"),
    TableRow(1, 14, 13, 5, 2, 26, 13, 4, _ratio(5, lambda k: 52 * k, 13, lambda k: 4 * k), 12,
             "b(5^{52k}-1)/(13(5^{4k}-1))"),
    TableRow(1, 15, 13, 7, 6, 26, 13, 12, _ratio(5, lambda k: 156 * k, 13, lambda k: 12 * k), 12,
             "b(5^{156k}-1)/(13(5^{12k}-1))"),
]

TABLE_2 = [
    TableRow(2, 1, 3, 3, 3, 2, 7, 2, _ratio(3, lambda k: 6 * k, 7, lambda k: 2 * k), 6,
             "b(3^{6k}-1)/(7(3^{2k}-1))"),
    TableRow(2, 2, 3, 5, 3, 2, 21, 2, _ratio(5, lambda k: 6 * k, 21, lambda k: 2 * k), 20,
             "b(5^{6k}-1)/(21(5^{2k}-1))"),
    TableRow(2, 3, 3, 7, 3, 2, 43, 2, _ratio(7, lambda k: 6 * k, 43, lambda k: 2 * k), 42,
             "b(7^{6k}-1)/(43(7^{2k}-1))"),
    TableRow(2, 4, 5, 3, 5, 2, 61, 2, _ratio(3, lambda k: 10 * k, 61, lambda k: 2 * k), 60,
             "b(3^{10k}-1)/(61(3^{2k}-1))"),
    TableRow(2, 5, 5, 5, 5, 2, 521, 2, _ratio(5, lambda k: 10 * k, 521, lambda k: 2 * k), 520,
             "b(5^{10k}-1)/(521(5^{2k}-1))"),
    TableRow(2, 6, 7, 3, 7, 2, 547, 2, _ratio(3, lambda k: 14 * k, 547, lambda k: 2 * k), 546,
             "b(3^{14k}-1)/(547(3^{2k}-1))"),
    TableRow(2, 7, 7, 5, 7, 2, 13021, 2, _ratio(5, lambda k: 14 * k, 13021, lambda k: 2 * k),
             13020, "b(5^{14k}-1)/(13021(5^{2k}-1))"),
    TableRow(2, 8, 11, 3, 11, 2, 44287, 2, _ratio(3, lambda k: 22 * k, 44287, lambda k: 2 * k),
             44286, "b(3^{22k}-1)/(44287(3^{2k}-1))"),
]

#: primes substituted into the "p odd" row
GENERIC_PRIMES = (3, 5, 7, 11, 13, 17, 19)


@dataclass
class RowCheck:
    row: TableRow
    p: int
    k: int
    case: str
    d0: int
    e: int
    m_unit: Optional[int]
    printed_m: Fraction
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    @property
    def label(self) -> str:
        return f"Table {self.row.table} row {self.row.index} (p0={self.row.p0}, p={self.p}, l={self.row.ell}, k={self.k})"


def table_row(row: TableRow, p: Optional[int] = None, k: int = 1) -> RowCheck:
    """Recompute d0 and m/b for one printed row and list every mismatch."""
    p = row.p if p is None else p
    if p is None:
        raise BadParameters("generic row needs an explicit p")
    t = row.t_per_k * k
    e = row.ell * t // row.p0
    report = case_analysis(row.p0, p, row.ell, t)
    printed = row.m_printed(p, k)
    mismatches = []
    if report.d0 != row.d0:
        mismatches.append(f"d0: printed {row.d0}, computed {report.d0}")
    if e != row.e_per_k * k:
        mismatches.append(f"e: printed {row.e_per_k * k}, computed {e}")
    if report.applies:
        if printed != report.m_unit:
            mismatches.append(f"m/b: printed {printed}, computed {report.m_unit}")
        if row.b_max != report.d0 - 1:
            mismatches.append(f"b range: printed {row.b_max}, computed {report.d0 - 1}")
    else:
        mismatches.append("d0 = 1: no construction")
    return RowCheck(row=row, p=p, k=k, case=report.case, d0=report.d0, e=e,
                    m_unit=report.m_unit, printed_m=printed, mismatches=mismatches)


def all_table_rows(k: int = 1, generic_primes=GENERIC_PRIMES) -> list[RowCheck]:
    out = []
    for row in TABLE_1 + TABLE_2:
        if row.p is None:
            out.extend(table_row(row, p, k) for p in generic_primes)
        else:
            out.append(table_row(row, k=k))
    return out
