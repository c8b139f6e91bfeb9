"""The symplectic polar space W(2r-1, p^e) modelled on GF(p^{2er}).

V is the field viewed as a 2r-dimensional space over the subfield
F = GF(p^e). The alternating form is f(x, y) = Tr_{q/p^e}(x L(y)) with
L(X) = delta X^sqrt(q), delta = gamma^((sqrt(q)+1)/2).

A projective point <x> is stored as log(x) mod (q-1)/(p^e-1); the point
set of an F^*-invariant set D is then just a set of residues.
"""

from __future__ import annotations

import itertools
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from . import kernels
from .errors import BadParameters, BudgetExceeded, FormCheckFailed, LogOfZero
from .gf import ZERO, Field, FieldElement, build_field, digits, encode, MAX_ORDER

log = logging.getLogger(__name__)

#: exhaustive f(x, x) cross-check runs up to this field order
EXHAUSTIVE_FORM_CAP = 2**20
#: refuse generator enumeration above this many generators
MAX_GENERATORS = 10**7
#: coordinate tables are built only up to this order
MAX_COORD_TABLE = 2**26


def rank_mod_p(mat, p: int) -> int:
    a = np.array(mat, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = None
        for i in range(rank, rows):
            if a[i, c]:
                piv = i
                break
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] * pow(int(a[rank, c]), -1, p) % p
        for i in range(rows):
            if i != rank and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[rank]) % p
        rank += 1
        if rank == rows:
            break
    return rank


class SmallField:
    """GF(p^e) inside GF(q) with label tables (0 = zero, 1 + k = zeta^k,
    zeta = gamma^((q-1)/(p^e-1)))."""

    def __init__(self, field: Field, e: int):
        self.field = field
        self.e = e
        self.size = field.p**e
        self.step = field.subfield_step(e)
        m = self.size - 1
        self.logs = np.array([ZERO] + [k * self.step for k in range(m)], dtype=np.int64)
        self.encodings = np.array([0] + [int(field.exp[k * self.step]) for k in range(m)],
                                  dtype=np.int64)
        lookup = {int(v): i for i, v in enumerate(self.encodings)}
        sums = field.add_encodings(self.encodings[:, None], self.encodings[None, :])
        self.add = np.vectorize(lookup.__getitem__)(sums).astype(np.int64)
        lab = np.arange(self.size)
        mul = ((lab[:, None] - 1) + (lab[None, :] - 1)) % m + 1
        mul[0, :] = 0
        mul[:, 0] = 0
        self.mul = mul.astype(np.int64)
        self.neg = np.array([int(np.nonzero(self.add[a] == 0)[0][0]) for a in lab])

    def label_of(self, x: FieldElement) -> int:
        if x.index == ZERO:
            return 0
        if x.index % self.step:
            raise BadParameters(f"{x} is not in GF({self.field.p}^{self.e})")
        return 1 + x.index // self.step

    def element(self, label: int) -> FieldElement:
        return FieldElement(self.field, int(self.logs[label]))

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return (-(a - 1)) % (self.size - 1) + 1


@dataclass(frozen=True)
class LinearizedForm:
    """L(X) = sum_i c_i X^(p^(ie)), i = 0 .. s/e - 1."""

    field: Field
    e: int
    coeffs: tuple

    def __post_init__(self):
        self.field.check_divisor(self.e)
        n = self.field.s // self.e
        if len(self.coeffs) != n:
            raise BadParameters(f"expected {n} coefficients, got {len(self.coeffs)}")

    @property
    def degree_count(self) -> int:
        return len(self.coeffs)

    @property
    def rank(self) -> int:
        return self.field.s // (2 * self.e)

    def monomial(self):
        nz = [(i, c) for i, c in enumerate(self.coeffs) if c.index != ZERO]
        return nz[0] if len(nz) == 1 else None

    def __call__(self, y: FieldElement) -> FieldElement:
        acc = self.field.zero
        for i, c in enumerate(self.coeffs):
            if c.index != ZERO:
                acc = acc + c * y.frobenius(i * self.e)
        return acc

    def image_logs(self, logs) -> np.ndarray:
        """log L(gamma^k) for an array of k (ZERO where L vanishes)."""
        F = self.field
        logs = np.asarray(logs, dtype=np.int64)
        mono = self.monomial()
        if mono is not None:
            i, c = mono
            mult = pow(F.p, i * self.e, F.order)
            return (c.index + logs * mult) % F.order
        enc = np.zeros(logs.shape, dtype=np.int64)
        for i, c in enumerate(self.coeffs):
            if c.index == ZERO:
                continue
            mult = pow(F.p, i * self.e, F.order)
            term = F.exp[(c.index + logs * mult) % F.order].astype(np.int64)
            enc = F.add_encodings(enc, term)
        return F.log[enc].astype(np.int64)


def _form_value_idx(field, trace, x_idx, ly_idx):
    if x_idx == ZERO or ly_idx == ZERO:
        return ZERO
    v = int(trace.by_log[(x_idx + ly_idx) % field.order])
    return int(field.log[v])


def check_alternating(form: LinearizedForm, exhaustive_cap: int = EXHAUSTIVE_FORM_CAP):
    """Coefficient criterion for f(x, y) = Tr(x L(y)) to be alternating.

    Returns ``(ok, witness)``; the witness names the failing coefficient or
    element. For small fields f(x, x) = 0 is also checked for every x and
    both answers must agree.
    """
    F = form.field
    n = form.degree_count
    c = form.coeffs
    ok, witness = True, None
    if c[0].index != ZERO:
        ok, witness = False, {"coefficient": 0, "reason": "c_0 != 0"}
    else:
        for i in range(1, n):
            if c[n - i].frobenius(i * form.e) != -c[i]:
                ok, witness = False, {"coefficient": i,
                                      "reason": "c_{2r-i}^(p^(ie)) != -c_i"}
                break
    if F.q <= exhaustive_cap:
        trace = F.trace_table(form.e)
        k = np.arange(F.order, dtype=np.int64)
        ly = form.image_logs(k)
        nz = ly != ZERO
        vals = trace.by_log[(k[nz] + ly[nz]) % F.order]
        bad = np.nonzero(vals != 0)[0]
        direct = len(bad) == 0
        if direct != ok:
            raise FormCheckFailed("coefficient criterion and f(x,x) evaluation disagree")
        if not direct and witness is not None:
            witness["element_log"] = int(k[nz][bad[0]])
    return ok, witness


def _gram(form: LinearizedForm, basis: Sequence[FieldElement], sub: SmallField):
    F = form.field
    trace = F.trace_table(form.e)
    images = [form(b) for b in basis]
    g = np.zeros((len(basis), len(basis)), dtype=np.int64)
    for i, x in enumerate(basis):
        for j, ly in enumerate(images):
            g[i, j] = sub.label_of(FieldElement(F, _form_value_idx(F, trace, x.index, ly.index)))
    return g


def independent_over_subfield(field: Field, vectors: Sequence[FieldElement], e: int) -> bool:
    """GF(p^e)-linear independence, tested as GF(p)-rank of zeta^k v."""
    if any(v.index == ZERO for v in vectors):
        return False
    if not vectors:
        return True
    step = field.subfield_step(e)
    rows = []
    for v in vectors:
        for k in range(e):
            rows.append(digits(field.encoding((v.index + k * step) % field.order),
                               field.p, field.s))
    return rank_mod_p(np.array(rows), field.p) == e * len(vectors)


def small_rank(sub: SmallField, mat) -> int:
    a = np.array(mat, dtype=np.int64)
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        piv = next((i for i in range(rank, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        inv = sub.inv(int(a[rank, c]))
        a[rank] = sub.mul[inv, a[rank]]
        for i in range(rows):
            if i != rank and a[i, c]:
                factor = sub.neg[a[i, c]]
                a[i] = sub.add[a[i], sub.mul[factor, a[rank]]]
        rank += 1
    return rank


def default_basis(field: Field, e: int, seed: int = 0) -> list[FieldElement]:
    """gamma^0, ..., gamma^(n-1) if independent over GF(p^e), else a seeded
    random basis."""
    n = field.s // e
    basis = [field(i) for i in range(n)]
    if independent_over_subfield(field, basis, e):
        return basis
    rng = np.random.default_rng(seed)
    while True:
        basis = [field(int(k)) for k in rng.integers(0, field.order, size=n)]
        if independent_over_subfield(field, basis, e):
            return basis


def check_nondegenerate(form: LinearizedForm) -> bool:
    """True iff x -> L(x) is a bijection, decided by the rank of the Gram
    matrix of f on a GF(p^e)-basis."""
    if all(c.index == ZERO for c in form.coeffs):
        return False
    sub = SmallField(form.field, form.e)
    basis = default_basis(form.field, form.e)
    g = _gram(form, basis, sub)
    return small_rank(sub, g) == len(basis)


@dataclass(frozen=True)
class IsotropicSubspace:
    basis: tuple

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass
class GeneratorScan:
    """Summary of a pass over all generators."""

    count: int = 0
    meet_counts: dict = dc_field(default_factory=dict)
    first_bad: Optional[dict] = None
    complete: bool = True


class SymplecticSpace:
    def __init__(self, p: int, e: int, r: int, max_order: int = MAX_ORDER):
        if p % 2 == 0:
            raise BadParameters("p must be odd")
        if r < 2:
            raise BadParameters("rank r must be at least 2")
        if e < 1:
            raise BadParameters("e must be positive")
        self.p, self.e, self.r = p, e, r
        self.field = build_field(p, 2 * e * r, max_order)
        F = self.field
        self.q = F.q
        self.root_q = p ** (e * r)
        self.sub_order = p**e
        self.point_modulus = F.order // (self.sub_order - 1)
        self.delta = F((self.root_q + 1) // 2)
        if self.delta.frobenius(e * r) != -self.delta:
            raise FormCheckFailed("delta^sqrt(q) != -delta")
        coeffs = [F.zero] * (2 * r)
        coeffs[r] = self.delta
        self.form = LinearizedForm(F, e, tuple(coeffs))
        ok, witness = check_alternating(self.form)
        if not ok:
            raise FormCheckFailed(f"form is not alternating: {witness}")
        if not check_nondegenerate(self.form):
            raise FormCheckFailed("form is degenerate")
        self.trace = F.trace_table(e)

    def __repr__(self):
        return f"W({2 * self.r - 1}, {self.p}^{self.e})"

    @property
    def dimension(self) -> int:
        return 2 * self.r

    @property
    def num_points(self) -> int:
        return self.point_modulus

    @property
    def hyperplane_size(self) -> int:
        F = self.sub_order
        return (F ** (2 * self.r - 1) - 1) // (F - 1)

    @property
    def generator_count(self) -> int:
        return math.prod(self.sub_order**i + 1 for i in range(1, self.r + 1))

    @cached_property
    def sub(self) -> SmallField:
        return SmallField(self.field, self.e)

    # -- form -----------------------------------------------------------------
    def L(self, y: FieldElement) -> FieldElement:
        return self.form(y)

    def eval_form(self, x: FieldElement, y: FieldElement) -> FieldElement:
        ly = self.form(y)
        return FieldElement(self.field, _form_value_idx(self.field, self.trace, x.index, ly.index))

    def form_zero_mask(self) -> np.ndarray:
        return self.trace.zero_mask_by_log

    # -- points -----------------------------------------------------------------
    def point_of(self, x: FieldElement) -> int:
        if x.index == ZERO:
            raise LogOfZero("the zero vector is not a point")
        return x.index % self.point_modulus

    def lift(self, point: int) -> FieldElement:
        return self.field(int(point) % self.point_modulus)

    def points_of_logs(self, logs) -> np.ndarray:
        return np.unique(np.asarray(logs, dtype=np.int64) % self.point_modulus)

    def perp_shifts(self, points) -> np.ndarray:
        """log L(y) for the lifted representative of each point."""
        return self.form.image_logs(np.asarray(points, dtype=np.int64))

    def perp_count(self, y: FieldElement, M) -> int:
        if y.index == ZERO:
            raise LogOfZero("perp of the zero vector")
        M = np.asarray(sorted(M) if isinstance(M, (set, frozenset)) else M, dtype=np.int64)
        if len(M) == 0:
            return 0
        shift = self.form.image_logs(np.array([y.index]))
        return int(kernels.perp_counts(self.form_zero_mask(), M, shift)[0])

    def perp_counts(self, ys, M) -> np.ndarray:
        """|<y>^perp ∩ M| for every point y in ``ys``."""
        M = np.asarray(M, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        if len(M) == 0:
            return np.zeros(len(ys), dtype=np.int64)
        return kernels.perp_counts(self.form_zero_mask(), M, self.perp_shifts(ys))

    # -- coordinates over GF(p^e) ---------------------------------------------
    @cached_property
    def basis(self) -> list[FieldElement]:
        return default_basis(self.field, self.e)

    @cached_property
    def gram(self) -> np.ndarray:
        return _gram(self.form, self.basis, self.sub)

    @cached_property
    def coord_encoding(self) -> np.ndarray:
        """Encoding of sum_i c_i b_i for coordinate index sum_i c_i F^i."""
        F = self.field
        if F.q > MAX_COORD_TABLE:
            raise BudgetExceeded(f"coordinate table for q={F.q} exceeds budget")
        sub = self.sub
        acc = np.zeros((1, F.s), dtype=np.int16)
        for b in self.basis:
            logs = sub.logs
            terms = np.zeros(sub.size, dtype=np.int64)
            terms[1:] = F.exp[(logs[1:] + b.index) % F.order]
            tdig = digits(terms, F.p, F.s).astype(np.int16)
            acc = ((tdig[:, None, :] + acc[None, :, :]) % F.p).astype(np.int16)
            acc = acc.reshape(-1, F.s)
        enc = encode(acc, F.p)
        if len(np.unique(enc)) != F.q:
            raise FormCheckFailed("basis is not independent over the subfield")
        return enc

    @cached_property
    def coord_point(self) -> np.ndarray:
        lg = self.field.log[self.coord_encoding].astype(np.int64)
        return np.where(lg == ZERO, -1, lg % self.point_modulus)

    def coords_to_element(self, labels) -> FieldElement:
        idx = 0
        for a in reversed(list(labels)):
            idx = idx * self.sub_order + int(a)
        return self.field.from_encoding(int(self.coord_encoding[idx]))

    # -- subspaces --------------------------------------------------------------
    def is_totally_isotropic(self, basis: Sequence[FieldElement]) -> bool:
        if len(basis) > self.r:
            return False
        if not independent_over_subfield(self.field, list(basis), self.e):
            return False
        for x in basis:
            for y in basis:
                if self.eval_form(x, y).index != ZERO:
                    return False
        return True

    def span_logs(self, basis: Sequence[FieldElement]) -> np.ndarray:
        """Logs of all non-zero vectors in the GF(p^e)-span of ``basis``."""
        F = self.field
        sub = self.sub
        acc = np.zeros((1, F.s), dtype=np.int64)
        for b in basis:
            terms = np.zeros(sub.size, dtype=np.int64)
            if b.index != ZERO:
                terms[1:] = F.exp[(sub.logs[1:] + b.index) % F.order]
            tdig = digits(terms, F.p, F.s)
            acc = ((tdig[:, None, :] + acc[None, :, :]) % F.p).reshape(-1, F.s)
        enc = encode(acc, F.p)
        enc = enc[enc != 0]
        return F.log[enc].astype(np.int64)

    def points_of_subspace(self, sub: IsotropicSubspace | Sequence[FieldElement]) -> np.ndarray:
        basis = sub.basis if isinstance(sub, IsotropicSubspace) else sub
        return self.points_of_logs(self.span_logs(basis))

    # -- generators -------------------------------------------------------------
    @cached_property
    def _rref_layout(self):
        n, r, fq = 2 * self.r, self.r, self.sub_order
        pivot_sets = list(itertools.combinations(range(n), r))
        pivots = np.array(pivot_sets, dtype=np.int64)
        free_cols = np.zeros((len(pivot_sets), r, n), dtype=np.int64)
        n_free = np.zeros((len(pivot_sets), r), dtype=np.int64)
        for pi, piv in enumerate(pivot_sets):
            for j, pj in enumerate(piv):
                free = [c for c in range(n) if c > pj and c not in piv]
                free_cols[pi, j, :len(free)] = free
                n_free[pi, j] = len(free)
        combos = []
        for coeffs in itertools.product(range(fq), repeat=r):
            nz = [c for c in coeffs if c]
            if nz and nz[0] == 1:
                combos.append(coeffs)
        combos = np.array(combos, dtype=np.int64)
        work = [(pi, c) for pi in range(len(pivot_sets))
                for c in range(fq ** int(n_free[pi, r - 1]))]
        return pivots, free_cols, n_free, combos, np.array(work, dtype=np.int64)

    def _check_generator_budget(self, max_generators):
        if self.generator_count > max_generators:
            raise BudgetExceeded(
                f"{self!r} has {self.generator_count} generators, cap is {max_generators}")

    def _run_work(self, work, in_m, target):
        pivots, free_cols, n_free, combos, _ = self._rref_layout
        return kernels.rref_generators(
            self.sub_order, 2 * self.r, self.r, self.sub.add, self.sub.mul, self.gram,
            pivots, free_cols, n_free, work, self.coord_point, in_m, combos, target)

    def _membership(self, M) -> np.ndarray:
        in_m = np.zeros(self.point_modulus, dtype=np.int64)
        if M is not None:
            in_m[np.asarray(M, dtype=np.int64)] = 1
        return in_m

    def _labels_to_subspace(self, labels) -> IsotropicSubspace:
        return IsotropicSubspace(tuple(self.coords_to_element(row) for row in labels))

    def enumerate_generators(self, chunk: int = 64,
                             max_generators: int = MAX_GENERATORS) -> Iterator[IsotropicSubspace]:
        """Stream every generator exactly once (RREF order)."""
        self._check_generator_budget(max_generators)
        work = self._rref_layout[4]
        in_m = self._membership(None)
        for lo in range(0, len(work), chunk):
            bases, _ = self._run_work(work[lo:lo + chunk], in_m, -1)
            for labels in bases:
                yield self._labels_to_subspace(labels)

    def scan_generators(self, M, target: Optional[int] = None, threads: int = 1,
                        chunk: int = 64, progress=None,
                        max_generators: int = MAX_GENERATORS) -> GeneratorScan:
        """Count |G ∩ M| for every generator G.

        With ``target`` set, stops at the first generator whose count differs
        and reports it in ``first_bad``. ``progress`` is called with the
        running generator count after each chunk.
        """
        self._check_generator_budget(max_generators)
        work = self._rref_layout[4]
        in_m = self._membership(M)
        tgt = -1 if target is None else int(target)
        scan = GeneratorScan()
        lock = threading.Lock()
        stop = threading.Event()
        chunks = [work[lo:lo + chunk] for lo in range(0, len(work), chunk)]

        def run(block):
            if stop.is_set():
                return None
            return self._run_work(block, in_m, tgt)

        def absorb(result):
            if result is None:
                return
            bases, meets = result
            with lock:
                scan.count += len(meets)
                vals, cnts = np.unique(meets, return_counts=True)
                for v, c in zip(vals.tolist(), cnts.tolist()):
                    scan.meet_counts[v] = scan.meet_counts.get(v, 0) + c
                if tgt >= 0 and len(meets) and meets[-1] != tgt and scan.first_bad is None:
                    sub = self._labels_to_subspace(bases[-1])
                    scan.first_bad = {
                        "meet": int(meets[-1]),
                        "basis_logs": [b.index for b in sub.basis],
                        "basis_coords": bases[-1].tolist(),
                    }
                    stop.set()
                if progress is not None:
                    progress(scan.count)

        if threads <= 1:
            for block in chunks:
                absorb(run(block))
                if stop.is_set():
                    break
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for result in pool.map(run, chunks):
                    absorb(result)
        scan.complete = not stop.is_set()
        return scan


def make_space(p: int, e: int, r: int, max_order: int = MAX_ORDER) -> SymplecticSpace:
    return SymplecticSpace(p, e, r, max_order)


def eval_form(space: SymplecticSpace, x: FieldElement, y: FieldElement) -> FieldElement:
    return space.eval_form(x, y)


def point_of(space: SymplecticSpace, x: FieldElement) -> int:
    return space.point_of(x)


def lift(space: SymplecticSpace, point: int) -> FieldElement:
    return space.lift(point)


def perp_count(space: SymplecticSpace, y: FieldElement, M) -> int:
    return space.perp_count(y, M)


def enumerate_generators(space: SymplecticSpace, **kw) -> Iterator[IsotropicSubspace]:
    return space.enumerate_generators(**kw)


def is_totally_isotropic(space: SymplecticSpace, basis) -> bool:
    return space.is_totally_isotropic(basis)


def points_of_subspace(space: SymplecticSpace, sub) -> np.ndarray:
    return space.points_of_subspace(sub)
