"""Certification of constructed m-ovoids.

Three independent routes decide whether a point set M is an m-ovoid:

* character: the exact spectrum of Cay(F_q, D_J) on all N cyclotomic
  shifts, composed with the class shift induced by L;
* perp: |<y>^perp ∩ M| against m(p^(e(r-1)) + 1) - [<y> in M] p^(e(r-1));
* generators: |G ∩ M| = m for every generator G.

Each check returns a ``Verdict``; a ``Certificate`` collects them.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .construct import OvoidCandidate
from .cyclotomy import (
    CyclotomicSystem,
    ExponentSet,
    SpectrumPrediction,
    as_integer,
    char_sums_logs,
    dual_exponents,
    predicted_spectrum,
)
from .errors import BadParameters, CountMismatch, InternalInconsistency, NonIntegralPeriod, NotSrg

#: full perp sweep up to this many points, sampled above
PERP_FULL_LIMIT = 10**5
#: random elements used to confirm that psi(y D) only depends on the class of y
CLASS_SPOT_CHECKS = 100

MODES = ("character", "perp", "generators")


@dataclass
class Verdict:
    name: str
    passed: bool
    witness: dict = field(default_factory=dict)
    seconds: float = 0.0
    status: str = "certified"

    def __bool__(self):
        return self.passed


class _Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


# ---------------------------------------------------------------------------
# strongly regular graph parameters

@dataclass(frozen=True)
class SrgParams:
    v: int
    k: int
    lam: int
    mu: int

    def satisfies_relation(self) -> bool:
        return self.k * (self.k - self.lam - 1) == (self.v - self.k - 1) * self.mu


@dataclass(frozen=True)
class QuadraticSurd:
    """rational + coeff * sqrt(radicand), radicand square-free (1 if rational)."""

    rational: Fraction
    coeff: Fraction
    radicand: int

    def __post_init__(self):
        if self.coeff == 0 or self.radicand == 1:
            object.__setattr__(self, "rational", self.rational + (self.coeff if self.radicand == 1 else 0))
            object.__setattr__(self, "coeff", Fraction(0))
            object.__setattr__(self, "radicand", 1)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1 or self.coeff == 0

    def value(self) -> Fraction:
        if self.is_rational:
            return self.rational
        raise ValueError(f"{self} is irrational")

    def __float__(self):
        return float(self.rational) + float(self.coeff) * math.sqrt(self.radicand)

    def __str__(self):
        if self.is_rational:
            return str(self.value())
        return f"{self.rational} + {self.coeff}*sqrt({self.radicand})"


def _square_part(n: int, limit: int = 10**6):
    """n = f^2 * d with d free of square factors below ``limit``."""
    r = math.isqrt(n)
    if r * r == n:
        return r, 1
    f, d = 1, n
    x = 2
    while x * x <= d and x <= limit:
        while d % (x * x) == 0:
            d //= x * x
            f *= x
        x += 1
    return f, d


@dataclass(frozen=True)
class SrgEigen:
    alpha1: QuadraticSurd
    alpha2: QuadraticSurd
    m1: QuadraticSurd
    m2: QuadraticSurd


def srg_eigen(params: SrgParams) -> SrgEigen:
    """Restricted eigenvalues and multiplicities, exactly."""
    if not params.satisfies_relation():
        raise NotSrg(f"k(k-lambda-1) != (v-k-1)mu for {params}")
    v, k, lam, mu = params.v, params.k, params.lam, params.mu
    diff = lam - mu
    delta = diff * diff + 4 * (k - mu)
    if delta <= 0:
        raise NotSrg(f"discriminant {delta} is not positive")
    f, d = _square_part(delta)
    half = Fraction(1, 2)
    a1 = QuadraticSurd(Fraction(diff, 2), Fraction(f, 2), d)
    a2 = QuadraticSurd(Fraction(diff, 2), Fraction(-f, 2), d)
    # (2k + (v-1)diff) / sqrt(delta) = X sqrt(d) / (f d)
    X = 2 * k + (v - 1) * diff
    c = Fraction(X, f * d)
    m1 = QuadraticSurd(Fraction(v - 1, 2), -half * c, d)
    m2 = QuadraticSurd(Fraction(v - 1, 2), half * c, d)
    return SrgEigen(a1, a2, m1, m2)


class SrgType(enum.Enum):
    LATIN = "Latin"
    NEGATIVE_LATIN = "NegativeLatin"
    NEITHER = "Neither"


@dataclass(frozen=True)
class TypeMatch:
    kind: SrgType
    n: Optional[int] = None
    a: Optional[int] = None


def classify_type(params: SrgParams) -> TypeMatch:
    """Match (n^2, a(n-eps), eps n + a^2 - 3 eps a, a^2 - eps a).

    When both signs fit (n = 2a - 1) the negative Latin reading is reported.
    """
    n = math.isqrt(params.v)
    if n * n != params.v or n < 2:
        return TypeMatch(SrgType.NEITHER)
    for eps, kind in ((-1, SrgType.NEGATIVE_LATIN), (1, SrgType.LATIN)):
        den = n - eps
        if params.k % den:
            continue
        a = params.k // den
        if (params.lam == eps * n + a * a - 3 * eps * a
                and params.mu == a * a - eps * a):
            return TypeMatch(kind, n, a)
    return TypeMatch(SrgType.NEITHER)


def negative_latin_params(q: int, D_size: int) -> SrgParams:
    root = math.isqrt(q)
    if root * root != q or D_size % (root + 1):
        raise BadParameters("|D| must be divisible by sqrt(q)+1")
    a = D_size // (root + 1)
    return SrgParams(q, D_size, -root + a * a + 3 * a, a * a + a)


def lambda_from_relation(v: int, k: int, mu: int) -> Fraction:
    return k - 1 + (1 - Fraction(v - 1, k)) * mu


# ---------------------------------------------------------------------------
# exponent-set checks

def check_sigma(J: ExponentSet) -> Verdict:
    image = ExponentSet.of(J.N, (-1 - i for i in J.members))
    missing = sorted(image.members - J.members)
    return Verdict("sigma-invariance", image == J,
                   {} if image == J else {"image_not_in_J": missing})


def check_rho(J: ExponentSet, d0: int) -> Verdict:
    image = J.shifted(2 * d0)
    missing = sorted(image.members - J.members)
    return Verdict("rho-invariance", image == J,
                   {"shift": 2 * d0} | ({} if image == J else {"image_not_in_J": missing}))


def class_shift(p: int, ell: int, t: int, N: int):
    """L(X) = delta X^sqrt(q) maps C_i onto C_{tau(i)}; returns tau as (a, c)
    with tau(i) = a*i + c mod N."""
    root = p ** (ell * t)
    return root % N, ((root + 1) // 2) % N


def check_self_dual(J: ExponentSet, pred: SpectrumPrediction) -> Verdict:
    a, c = class_shift(pred.p, pred.ell, pred.t, pred.N)
    image = ExponentSet.of(J.N, (a * i + c for i in J.members))
    dual = dual_exponents(J, pred)
    by_shift = image == dual
    witness = {"tau": [a, c], "L(J)": image.sorted(), "dual": dual.sorted()}
    if pred.eps_power == 1:
        by_sigma = check_sigma(J).passed
        if (a, c) == (1, 1) and by_sigma != by_shift:
            raise InternalInconsistency(
                f"self-duality routes disagree for J={J.sorted()}: "
                f"shift={by_shift}, sigma={by_sigma}")
        witness["sigma"] = by_sigma
    return Verdict("self-duality", by_shift, witness)


def check_pds_spectrum(J: ExponentSet, sys: CyclotomicSystem,
                       pred: Optional[SpectrumPrediction] = None,
                       spot_checks: int = CLASS_SPOT_CHECKS, seed: int = 0) -> Verdict:
    """Exact values psi(gamma^i D_J), i in Z_N, against the prediction."""
    with _Timer() as tm:
        F = sys.field
        if pred is None:
            if not sys.semiprimitive:
                raise NonIntegralPeriod(f"N={sys.N} is not semiprimitive for p={F.p}")
            ell = sys.ell
            t = F.s // (2 * ell)
            pred = predicted_spectrum(F.p, ell, t, len(J), N=sys.N)
        sums = sys.coset_sums(J)
        values = []
        for i, v in enumerate(sums):
            x = as_integer(v)
            if x is None:
                raise NonIntegralPeriod(f"psi(gamma^{i} D_J) is not an integer: {v.counts}")
            values.append(x)
        witness = {"values": values, "alpha1": pred.alpha1, "alpha2": pred.alpha2}
        problems = []
        at_alpha2 = {i for i, x in enumerate(values) if x == pred.alpha2}
        others = [x for x in values if x not in (pred.alpha1, pred.alpha2)]
        if others:
            problems.append(f"values outside {{alpha1, alpha2}}: {sorted(set(others))}")
        if len(at_alpha2) != len(J):
            problems.append(f"alpha2 attained {len(at_alpha2)} times, expected {len(J)}")
        dual = dual_exponents(J, pred)
        if at_alpha2 != set(dual.members):
            problems.append(f"alpha2 at {sorted(at_alpha2)}, dual is {dual.sorted()}")
        if sum(values) != -len(J):
            problems.append(f"sum of values {sum(values)} != -|J| = {-len(J)}")
        D_logs = sys.union_logs(J)
        principal = len(D_logs)
        if principal != pred.k:
            problems.append(f"|D_J| = {principal}, valency {pred.k}")
        if spot_checks:
            rng = np.random.default_rng(seed)
            ys = rng.integers(0, F.order, size=spot_checks)
            direct = char_sums_logs(F, D_logs, ys)
            for y, v in zip(ys.tolist(), direct):
                if as_integer(v) != values[y % sys.N]:
                    problems.append(f"psi(g^{y} D) differs from its class value")
                    break
            witness["spot_checks"] = int(spot_checks)
        witness["valency"] = principal
        if problems:
            witness["problems"] = problems
    return Verdict("pds-spectrum", not problems, witness, tm.seconds)


def lower_bound_check(m: int, p: int, e: int, r: int) -> Verdict:
    """m >= (-3 + sqrt(9 + 4 p^(er))) / (2 p^e - 2), compared exactly."""
    if r <= 2:
        raise BadParameters("the bound is stated for r > 2")
    F = p**e
    lhs = m * (2 * F - 2) + 3
    ok = lhs >= 0 and lhs * lhs >= 9 + 4 * F**r
    return Verdict("lower-bound", ok, {"m": m, "q_sub": F, "r": r})


# ---------------------------------------------------------------------------
# m-ovoid routes

def expected_perp_counts(m: int, p: int, e: int, r: int) -> tuple[int, int]:
    """(count for points of M, count for points outside M)."""
    h = p ** (e * (r - 1))
    return m * (h + 1) - h, m * (h + 1)


def _character_route(cand: OvoidCandidate) -> Verdict:
    with _Timer() as tm:
        space, sys, J = cand.space, cand.cyclotomy, cand.J
        prm = cand.params
        problems = []
        witness = {}
        expected_M = space.points_of_logs(sys.union_logs(J))
        if not np.array_equal(np.sort(np.asarray(cand.M)), expected_M):
            ours = set(np.asarray(cand.M).tolist())
            theirs = set(expected_M.tolist())
            witness["missing_points"] = sorted(theirs - ours)[:10]
            witness["extra_points"] = sorted(ours - theirs)[:10]
            problems.append("M is not the point set of D_J")
        D_size = cand.D_size
        if D_size != len(expected_M) * (space.sub_order - 1):
            problems.append("D_J is not invariant under the subfield")
        pred = predicted_spectrum(prm.p, prm.ell, prm.t, len(J))
        spec = check_pds_spectrum(J, sys, pred)
        witness["spectrum"] = spec.witness
        if not spec.passed:
            problems.append("spectrum check failed")
        values = spec.witness["values"]
        # Psi_y(D) = psi(L(y) D); L(y) for y in C_i lies in C_tau(i)
        a, c = class_shift(prm.p, prm.ell, prm.t, prm.N)
        via_tau = [values[(a * i + c) % prm.N] for i in range(prm.N)]
        shifts = space.perp_shifts(np.arange(prm.N))
        direct = [as_integer(v) for v in char_sums_logs(space.field, sys.union_logs(J), shifts)]
        if direct != via_tau:
            problems.append("Psi_y(D) computed directly disagrees with the class shift")
        at_alpha2 = {i for i, x in enumerate(direct) if x == pred.alpha2}
        if at_alpha2 != set(J.members):
            problems.append(f"Psi_y(D) = alpha2 on {sorted(at_alpha2)}, not on J")
        root = space.root_q
        if D_size % (root + 1) or pred.alpha1 != D_size // (root + 1):
            problems.append("alpha1 != |D|/(sqrt(q)+1)")
        if cand.m_claimed * (root + 1) * (space.sub_order - 1) != D_size:
            problems.append("m_claimed (sqrt(q)+1)(p^e-1) != |D|")
        witness["Psi_by_class"] = direct
        if problems:
            witness["problems"] = problems
    return Verdict("character", not problems, witness, tm.seconds)


def _perp_route(cand: OvoidCandidate, full_limit=PERP_FULL_LIMIT, seed=0,
                early_exit=False, chunk=4096, progress=None) -> Verdict:
    with _Timer() as tm:
        space = cand.space
        M = np.sort(np.asarray(cand.M, dtype=np.int64))
        in_m = np.zeros(space.num_points, dtype=bool)
        in_m[M] = True
        m = cand.m_claimed
        want_in, want_out = expected_perp_counts(m, space.p, space.e, space.r)
        if space.num_points <= full_limit:
            ys = np.arange(space.num_points, dtype=np.int64)
            status = "certified"
        else:
            rng = np.random.default_rng(seed)
            outside = np.nonzero(~in_m)[0]
            pick = rng.choice(outside, size=min(len(M), len(outside)), replace=False)
            ys = np.sort(np.concatenate([M, pick]))
            status = "sampled"
        hist = {}
        total = 0
        first_bad = None
        done = 0
        for lo in range(0, len(ys), chunk):
            block = ys[lo:lo + chunk]
            counts = space.perp_counts(block, M)
            want = np.where(in_m[block], want_in, want_out)
            total += int(counts.sum())
            for inside in (True, False):
                sel = in_m[block] == inside
                vals, cnts = np.unique(counts[sel], return_counts=True)
                for v, c in zip(vals.tolist(), cnts.tolist()):
                    key = (inside, v)
                    hist[key] = hist.get(key, 0) + c
            bad = np.nonzero(counts != want)[0]
            if len(bad) and first_bad is None:
                y = int(block[bad[0]])
                first_bad = {"point": y, "log": y, "in_M": bool(in_m[y]),
                             "count": int(counts[bad[0]]), "expected": int(want[bad[0]])}
            done += len(block)
            if progress is not None:
                progress(done * len(M))
            if first_bad is not None and early_exit:
                break
        witness = {
            "expected_in_M": want_in,
            "expected_outside": want_out,
            "points_checked": done,
            "counts_in_M": {v: c for (inside, v), c in sorted(hist.items()) if inside},
            "counts_outside": {v: c for (inside, v), c in sorted(hist.items()) if not inside},
        }
        passed = first_bad is None
        if status == "certified" and done == space.num_points:
            checksum = len(M) * space.hyperplane_size
            witness["checksum"] = {"sum": total, "expected": checksum}
            if total != checksum:
                passed = False
        if first_bad is not None:
            witness["first_bad"] = first_bad
    return Verdict("perp", passed, witness, tm.seconds, status)


def _generator_route(cand: OvoidCandidate, threads=1, early_exit=False, progress=None,
                     max_generators=None) -> Verdict:
    with _Timer() as tm:
        space = cand.space
        kw = {} if max_generators is None else {"max_generators": max_generators}
        scan = space.scan_generators(cand.M, target=cand.m_claimed if early_exit else None,
                                     threads=threads, progress=progress, **kw)
        m = cand.m_claimed
        bad = {k: v for k, v in scan.meet_counts.items() if k != m}
        passed = not bad and scan.count == space.generator_count and scan.first_bad is None
        witness = {"generators": scan.count, "expected_generators": space.generator_count,
                   "meet_counts": dict(sorted(scan.meet_counts.items())),
                   "complete": scan.complete}
        if scan.first_bad is not None:
            witness["first_bad"] = scan.first_bad
    return Verdict("generators", passed, witness, tm.seconds)


def check_movoid(cand: OvoidCandidate, mode: str, strict: bool = False, **kw) -> Verdict:
    """Run one m-ovoid route. With ``strict`` a failure raises CountMismatch
    carrying the witness instead of returning a failed verdict."""
    if mode == "character":
        v = _character_route(cand)
    elif mode == "perp":
        v = _perp_route(cand, **kw)
    elif mode == "generators":
        v = _generator_route(cand, **kw)
    else:
        raise BadParameters(f"unknown mode {mode!r}; choose from {MODES}")
    if strict and not v.passed:
        raise CountMismatch(f"{mode} route failed", v.witness)
    return v


def check_srg_parameters(cand: OvoidCandidate) -> Verdict:
    space = cand.space
    q, D_size, root = space.q, cand.D_size, space.root_q
    prm = negative_latin_params(q, D_size)
    problems = []
    lam_rel = lambda_from_relation(prm.v, prm.k, prm.mu)
    if lam_rel != prm.lam:
        problems.append(f"lambda from relation {lam_rel} != displayed {prm.lam}")
    if not prm.satisfies_relation():
        problems.append("k(k-lambda-1) != (v-k-1)mu")
    kind = classify_type(prm)
    if kind.kind is not SrgType.NEGATIVE_LATIN:
        problems.append(f"type {kind.kind.value}")
    eig = srg_eigen(prm)
    pred = predicted_spectrum(cand.params.p, cand.params.ell, cand.params.t, len(cand.J))
    if eig.alpha1.value() != pred.alpha1 or eig.alpha2.value() != pred.alpha2:
        problems.append("eigenvalues differ from the cyclotomic prediction")
    if eig.m2.value() != D_size or eig.m1.value() != q - 1 - D_size:
        problems.append("multiplicities differ from (q-1-|D|, |D|)")
    witness = {"v": prm.v, "k": prm.k, "lambda": prm.lam, "mu": prm.mu,
               "type": kind.kind.value, "n": kind.n, "a": kind.a,
               "alpha1": str(eig.alpha1), "alpha2": str(eig.alpha2),
               "m1": str(eig.m1), "m2": str(eig.m2)}
    if problems:
        witness["problems"] = problems
    return Verdict("srg-parameters", not problems, witness)


# ---------------------------------------------------------------------------

@dataclass
class Certificate:
    summary: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def status(self) -> str:
        if not self.passed:
            return "fail"
        if any(c.status == "sampled" for c in self.checks):
            return "sampled"
        return "certified"

    def check(self, name: str) -> Optional[Verdict]:
        return next((c for c in self.checks if c.name == name), None)

    def to_dict(self) -> dict:
        return {
            "candidate": self.summary,
            "checks": [
                {"name": c.name, "verdict": "pass" if c.passed else "fail",
                 "status": c.status, "seconds": round(c.seconds, 3), "witness": c.witness}
                for c in self.checks
            ],
            "overall": "pass" if self.passed else "fail",
            "status": self.status,
        }


def candidate_summary(cand: OvoidCandidate) -> dict:
    prm = cand.params
    return {
        "p": prm.p, "e": prm.e, "r": prm.r, "l": prm.ell, "t": prm.t, "N": prm.N,
        "d0": prm.d0, "b": len(cand.orbit_indices), "orbits": list(cand.orbit_indices),
        "J": cand.J.sorted(), "m_claimed": cand.m_claimed, "points": int(len(cand.M)),
    }


def certify(cand: OvoidCandidate, modes=MODES, threads: int = 1, early_exit: bool = False,
            full_limit: int = PERP_FULL_LIMIT, seed: int = 0,
            progress: Optional[Callable[[str, int], None]] = None) -> Certificate:
    """Run the structural checks and the requested verification routes."""
    prm = cand.params
    pred = predicted_spectrum(prm.p, prm.ell, prm.t, len(cand.J))
    checks = [check_sigma(cand.J), check_rho(cand.J, prm.d0),
              check_self_dual(cand.J, pred), check_srg_parameters(cand)]
    if prm.r > 2:
        checks.append(lower_bound_check(cand.m_claimed, prm.p, prm.e, prm.r))

    def report(name):
        if progress is None:
            return None
        return lambda n: progress(name, n)

    for mode in modes:
        if mode == "character":
            checks.append(check_movoid(cand, "character"))
        elif mode == "perp":
            checks.append(check_movoid(cand, "perp", full_limit=full_limit, seed=seed,
                                       early_exit=early_exit, progress=report("perp")))
        elif mode == "generators":
            checks.append(check_movoid(cand, "generators", threads=threads,
                                       early_exit=early_exit, progress=report("generators")))
        else:
            raise BadParameters(f"unknown mode {mode!r}")
    routes = [c for c in checks if c.name in MODES]
    if len({c.passed for c in routes}) > 1:
        checks.append(Verdict("route-agreement", False,
                              {c.name: c.passed for c in routes}))
    return Certificate(candidate_summary(cand), checks)
