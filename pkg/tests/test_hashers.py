import numpy as np
import pytest
from scipy.stats import binomtest

from mipslsh.collision import analytic_collision
from mipslsh.hashers import (
    BIT,
    INTEGER,
    HashCode,
    HashCodes,
    L2HashDraw,
    SignHashDraw,
    build_codes,
    gaussian_draws,
    hamming,
    hamming_matrix,
    l2_symbol,
    sign_bit,
)
from mipslsh.transforms import L2AlshParams, SignAlshParams

from conftest import random_ball, random_sphere

PARAMS = {
    "simple-lsh": None,
    "simple-alsh": None,
    "l2-alsh": L2AlshParams(m=3, U=0.83, r=2.5),
    "sign-alsh": SignAlshParams(m=2, U=0.75),
}


def _draw_along(v, b=0.0, r=1.0):
    # 1-d draw a = [1] so that a.z = v exactly
    return L2HashDraw(np.array([1.0]), b, r), np.array([v])


@pytest.mark.parametrize("az,b,r,expected", [
    (0.0, 0.3, 1.0, 0),
    (2.5, 0.0, 2.5, 1),
    (-0.1, 0.0, 1.0, -1),
])
def test_l2_symbol_examples(az, b, r, expected):
    draw, z = _draw_along(az, b, r)
    assert l2_symbol(z, draw) == expected


@pytest.mark.parametrize("az,expected", [(3.2, 1), (-0.001, -1), (0.0, 1)])
def test_sign_bit_examples(az, expected):
    assert sign_bit(np.array([az]), SignHashDraw(np.array([1.0]))) == expected


def test_draw_validation_and_dim_mismatch():
    with pytest.raises(ValueError):
        L2HashDraw(np.ones(2), 1.0, 1.0)
    with pytest.raises(ValueError):
        l2_symbol(np.ones(3), L2HashDraw(np.ones(2), 0.0, 1.0))
    with pytest.raises(ValueError):
        sign_bit(np.ones(3), SignHashDraw(np.ones(2)))


def test_hamming_examples():
    a = HashCode(np.array([1, 1, -1, -1]), BIT)
    b = HashCode(np.array([1, -1, -1, 1]), BIT)
    assert hamming(a, a) == 0
    assert hamming(a, b) == 2
    assert hamming(HashCode(np.array([0, 1, 2]), INTEGER), HashCode(np.array([0, 1, 3]), INTEGER)) == 1


def test_hamming_mismatches():
    with pytest.raises(ValueError):
        hamming(HashCode(np.array([1]), BIT), HashCode(np.array([1]), INTEGER))
    with pytest.raises(ValueError):
        hamming(HashCode(np.array([1]), BIT), HashCode(np.array([1, 1]), BIT))


@pytest.mark.parametrize("scheme", list(PARAMS))
def test_hamming_matrix_matches_pairwise(scheme):
    rng = np.random.default_rng(0)
    items = random_ball(rng, 30, 4)
    qs = random_sphere(rng, 7, 4) * (0.5 if scheme == "simple-alsh" else 1.0)
    ci = build_codes(scheme, PARAMS[scheme], items, "data", 40, 3)
    cq = build_codes(scheme, PARAMS[scheme], qs, "query", 40, 3)
    D = hamming_matrix(cq, ci, chunk=3)
    brute = [[hamming(cq[i], ci[j]) for j in range(len(ci))] for i in range(len(cq))]
    np.testing.assert_array_equal(D, brute)


@pytest.mark.parametrize("scheme", list(PARAMS))
def test_build_codes_deterministic_and_prefix(scheme):
    rng = np.random.default_rng(5)
    X = random_ball(rng, 6, 3)
    a = build_codes(scheme, PARAMS[scheme], X, "data", 300, 11)
    b = build_codes(scheme, PARAMS[scheme], X, "data", 300, 11)
    np.testing.assert_array_equal(a.symbols, b.symbols)
    short = build_codes(scheme, PARAMS[scheme], X, "data", 17, 11)
    np.testing.assert_array_equal(short.symbols, a.prefix(17).symbols)
    other = build_codes(scheme, PARAMS[scheme], X, "data", 300, 12)
    assert not np.array_equal(other.symbols, a.symbols)


def test_gaussian_draws_prefix_across_blocks():
    A1, u1 = gaussian_draws(7, 600, 5)
    A2, u2 = gaussian_draws(7, 257, 5)
    np.testing.assert_array_equal(A1[:257], A2)
    np.testing.assert_array_equal(u1[:257], u2)
    assert np.all((u1 >= 0) & (u1 < 1))


def test_simple_lsh_equal_points_identical_codes():
    q = np.array([[0.6, 0.8, 0.0]])
    a = build_codes("simple-lsh", None, q, "data", 64, 1)
    b = build_codes("simple-lsh", None, q, "query", 64, 1)
    assert hamming(a[0], b[0]) == 0


def test_simple_alsh_zero_vectors_agree_half_the_time():
    z = np.zeros((1, 3))
    agree = 0
    total = 0
    for seed in range(200):
        p = build_codes("simple-alsh", None, z, "data", 8, seed)
        q = build_codes("simple-alsh", None, z, "query", 8, seed)
        agree += 8 - hamming(p[0], q[0])
        total += 8
    assert binomtest(agree, total, 0.5).pvalue > 1e-3


def test_hash_codes_containers():
    c = HashCodes(np.arange(12).reshape(3, 4), INTEGER)
    assert len(c) == 3 and c.K == 4
    assert c[1].K == 4
    np.testing.assert_array_equal(c.take([2, 0]).symbols[:, 0], [8, 0])
    with pytest.raises(ValueError):
        c.prefix(5)
    with pytest.raises(ValueError):
        gaussian_draws(0, 0, 3)


@pytest.mark.parametrize("scheme", list(PARAMS))
def test_agreement_rate_converges_to_analytic(scheme):
    rng = np.random.default_rng(list(PARAMS).index(scheme))
    K = 100_000
    bad = 0
    for trial in range(5):
        x = random_ball(rng, 1, 4)
        q = random_sphere(rng, 1, 4)
        if scheme == "simple-alsh":
            q = q * rng.uniform(0.2, 1.0)
        cx = build_codes(scheme, PARAMS[scheme], x, "data", K, trial)
        cq = build_codes(scheme, PARAMS[scheme], q, "query", K, trial)
        rate = np.mean(cx.symbols[0] == cq.symbols[0])
        p = analytic_collision(scheme, PARAMS[scheme], x[0], q[0])
        bad += abs(rate - p) > 3 * np.sqrt(p * (1 - p) / K) + 1e-12
    assert bad <= 1
