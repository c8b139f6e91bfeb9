"""The numba kernels and the numpy fallback must agree bit for bit."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from movoid import kernels
from movoid.symplectic import make_space

needs_numba = pytest.mark.skipif(not kernels.USE_NUMBA, reason="numba path disabled")


@needs_numba
def test_trace_histograms_agree():
    rng = np.random.default_rng(0)
    table = rng.integers(0, 5, size=3000).astype(np.int64)
    logs = rng.integers(0, 3000, size=700).astype(np.int64)
    shifts = rng.integers(-5000, 5000, size=40).astype(np.int64)
    a = kernels._trace_histograms_np(table, logs, shifts, 5)
    b = kernels._trace_histograms_nb(table, logs, shifts % 3000, 5)
    assert np.array_equal(a, b)
    assert (a.sum(axis=1) == 700).all()


@needs_numba
def test_perp_counts_agree():
    rng = np.random.default_rng(1)
    mask = (rng.random(5000) < 0.3).astype(np.int64)
    m_logs = rng.choice(5000, size=400, replace=False).astype(np.int64)
    shifts = rng.integers(0, 5000, size=333).astype(np.int64)
    assert np.array_equal(kernels._perp_counts_np(mask, m_logs, shifts),
                          kernels._perp_counts_nb(mask, m_logs, shifts))


@needs_numba
@pytest.mark.parametrize("p,e,r", [(3, 1, 2), (3, 1, 3), (3, 2, 2), (5, 1, 2)])
def test_rref_generators_agree(p, e, r):
    space = make_space(p, e, r)
    pivots, free_cols, n_free, combos, work = space._rref_layout
    rng = np.random.default_rng(p + e + r)
    in_m = (rng.random(space.num_points) < 0.4).astype(np.int64)
    args = (space.sub_order, 2 * r, r, space.sub.add, space.sub.mul, space.gram, pivots,
            free_cols, n_free, work, space.coord_point, in_m, combos)
    prepared = [np.ascontiguousarray(a, dtype=np.int64) if isinstance(a, np.ndarray) else a
                for a in args]
    b_np, m_np = kernels._rref_generators_np(*prepared, -1)
    b_nb, m_nb = kernels._rref_generators_nb(*prepared, -1)
    assert np.array_equal(b_np, b_nb)
    assert np.array_equal(m_np, m_nb)
    assert len(m_np) == space.generator_count
    # early exit stops at the same subspace on both paths
    target = int(np.bincount(m_np).argmax())
    e_np = kernels._rref_generators_np(*prepared, target)
    e_nb = kernels._rref_generators_nb(*prepared, target)
    assert np.array_equal(e_np[1], e_nb[1])
    assert e_np[1][-1] != target


SCRIPT = """
import json
import numpy as np
from movoid import kernels
from movoid.construct import ConstructionParams, build_candidate
from movoid.verify import certify
c = build_candidate(ConstructionParams.resolve(3, ell=3, t=2, b=2))
cert = certify(c, modes=("character", "perp"))
space = c.space
print(json.dumps({"backend": kernels.backend(), "passed": cert.passed,
                  "perp": cert.check("perp").witness["counts_in_M"],
                  "values": cert.check("character").witness["spectrum"]["values"]}))
"""


def _run(flag):
    env = dict(os.environ, MOVOID_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def test_backends_certify_identically():
    slow = _run("0")
    assert slow["backend"] == "numpy"
    fast = _run("1")
    assert slow["passed"] and fast["passed"]
    assert slow["perp"] == fast["perp"]
    assert slow["values"] == fast["values"]
