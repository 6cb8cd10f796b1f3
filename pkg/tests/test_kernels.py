"""Backend equivalence: the compiled kernels must match the numpy
fallback bit for bit, so a run reproduces regardless of backend."""

import subprocess
import sys

import numpy as np
import pytest

from moorank.kernels import fallback

native = pytest.importorskip(
    "moorank.kernels._native", reason="compiled kernel extension not built"
)


def random_case(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 150))
    m = int(rng.integers(2, 4))
    obj = rng.random((n, m))
    if seed % 3 == 0:
        obj = np.round(obj, 1)  # force ties and duplicates
    viol = None
    if seed % 2:
        viol = np.where(rng.random(n) < 0.4, rng.random(n), 0.0)
    return obj, viol


@pytest.mark.parametrize("seed", range(60))
def test_non_dominated_sort_identical(seed):
    obj, viol = random_case(seed)
    expected = fallback.non_dominated_sort(obj, viol)
    got = native.non_dominated_sort(obj, viol)
    assert len(expected) == len(got)
    for a, b in zip(expected, got):
        assert np.array_equal(a, b)


@pytest.mark.parametrize("seed", range(60))
def test_crowding_distance_identical(seed):
    obj, viol = random_case(seed)
    front = obj[fallback.non_dominated_sort(obj, viol)[0]]
    a = fallback.crowding_distance(front)
    b = native.crowding_distance(front)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("seed", range(60))
def test_hypervolume_identical(seed):
    obj, _ = random_case(seed)
    a = fallback.hypervolume_2d(obj[:, :2], 2.0, 2.0)
    b = native.hypervolume_2d(obj[:, :2], 2.0, 2.0)
    assert a == b


def test_env_var_forces_fallback():
    code = (
        "import os; os.environ['MOORANK_KERNELS'] = 'fallback'; "
        "from moorank import kernels; print(kernels.active_backend())"
    )
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, check=True
    )
    assert out.stdout.strip() == "fallback"


def test_default_backend_is_native_when_built():
    from moorank import kernels

    assert kernels.active_backend() in ("native", "fallback")
