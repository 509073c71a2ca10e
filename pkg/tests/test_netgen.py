import numpy as np
import pytest

from oracles import transmission_oracle
from tvcs.errors import DimensionError
from tvcs.netgen import (
    INDUCTION_FORMULA,
    TRANSMISSION_FORMULA,
    Family,
    GeneratorConfig,
    RawConnectivity,
    convert,
    generate,
    induction,
    normalize_spectral,
    random_connectivity,
    transmission,
)


def degrees(c):
    return (c > 0).sum(axis=0)


def test_star():
    c = generate(GeneratorConfig("star", 5)).c
    assert np.count_nonzero(c) == 8
    np.testing.assert_array_equal(c[0, 1:], 1.0)
    np.testing.assert_array_equal(c[1:, 0], 1.0)


def test_line_and_ring():
    line = generate(GeneratorConfig("line", 6, edge_weight=0.5)).c
    assert np.count_nonzero(line) == 10
    np.testing.assert_array_equal(np.diag(line, 1), 0.5)
    ring = generate(GeneratorConfig(Family.RING, 6)).c
    np.testing.assert_array_equal(degrees(ring), 2)
    assert ring[0, 5] == 1.0


@pytest.mark.parametrize("p, nnz", [(0.0, 0), (1.0, 100 * 99)])
def test_er_boundaries(p, nnz):
    c = generate(GeneratorConfig("er", 100, p=p)).c
    assert np.count_nonzero(c) == nnz
    assert not np.diag(c).any()


def test_er_directed_and_uniform_weights():
    cfg = GeneratorConfig("er", 40, p=0.3, directed=True, weight_mode="uniform", seed=3)
    raw = generate(cfg)
    assert raw.directed
    assert not np.allclose(raw.c, raw.c.T)
    w = raw.c[raw.c > 0]
    assert w.min() > 0 and w.max() < 1 and len(np.unique(w)) == w.size


@pytest.mark.parametrize("seed", range(5))
def test_ba_edge_count(seed):
    n, m_a = 50, 2
    c = generate(GeneratorConfig("ba", n, m_a=m_a, seed=seed)).c
    core = m_a + 1
    assert np.count_nonzero(c) // 2 == core * (core - 1) // 2 + m_a * (n - core)
    np.testing.assert_array_equal(c, c.T)


def test_ba_heavy_tail():
    heavy = 0
    for seed in range(100):
        d = degrees(generate(GeneratorConfig("ba", 50, m_a=2, seed=seed)).c)
        heavy += d.max() > 2 * np.median(d)
    assert heavy >= 90


@pytest.mark.parametrize("beta", [0.0, 0.3, 1.0])
def test_ws_edge_count(beta):
    n, k = 30, 4
    c = generate(GeneratorConfig("ws", n, k_ring=k, beta=beta, seed=1)).c
    assert np.count_nonzero(c) // 2 == n * k // 2
    assert not np.diag(c).any()
    if beta == 0.0:
        np.testing.assert_array_equal(degrees(c), k)


def test_generate_is_deterministic():
    cfg = GeneratorConfig("ws", 40, k_ring=6, beta=0.2, weight_mode="uniform", seed=9)
    np.testing.assert_array_equal(generate(cfg).c, generate(cfg).c)
    other = GeneratorConfig("ws", 40, k_ring=6, beta=0.2, weight_mode="uniform", seed=10)
    assert not np.array_equal(generate(cfg).c, generate(other).c)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"family": "ring", "n": 2},
        {"family": "er", "n": 5},
        {"family": "er", "n": 5, "p": 1.5},
        {"family": "ba", "n": 2, "m_a": 2},
        {"family": "ws", "n": 10, "k_ring": 3, "beta": 0.1},
        {"family": "ws", "n": 10, "k_ring": 4},
        {"family": "star", "n": 5, "directed": True},
        {"family": "line", "n": 0},
        {"family": "line", "n": 3, "edge_weight": 0.0},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        GeneratorConfig(**kwargs)


def test_config_dict_round_trip():
    cfg = GeneratorConfig("ba", 20, m_a=3, seed=4)
    assert GeneratorConfig(**cfg.to_dict()) == cfg


def test_raw_validation():
    with pytest.raises(DimensionError):
        RawConnectivity(np.ones((2, 3)), True)
    with pytest.raises(DimensionError):
        RawConnectivity(-np.eye(2), True)


def test_transmission_rows():
    a = transmission(np.array([[2.0, 2.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    np.testing.assert_array_equal(a[0], [0.5, 0.5, 0.0])
    np.testing.assert_array_equal(a[1], [0.0, 1.0, 0.0])  # isolated node keeps itself


@pytest.mark.parametrize("seed", range(10))
def test_transmission_row_sums(seed):
    rng = np.random.default_rng(seed)
    raw = random_connectivity(20, rng.random(), rng)
    a = transmission(raw)
    np.testing.assert_allclose(a.sum(axis=1), 1.0, rtol=0, atol=1e-15)
    np.testing.assert_allclose(a, transmission_oracle(raw.c), rtol=1e-15)


def test_induction_pure_decay():
    np.testing.assert_allclose(induction(np.zeros((3, 3))), np.exp(-1) * np.eye(3), rtol=1e-14)


def test_induction_small_tau():
    rng = np.random.default_rng(0)
    c = rng.random((4, 4))
    rho = np.max(np.abs(np.linalg.eigvals(c)))
    tau = 1e-6
    first_order = np.eye(4) + tau * (c / rho - np.eye(4))
    np.testing.assert_allclose(induction(c, tau=tau), first_order, atol=1e-11)


def test_induction_long_range():
    c = np.zeros((3, 3))
    c[1, 0] = c[2, 1] = 1.0  # 0 -> 1 -> 2
    a = induction(c)
    assert c[2, 0] == 0 and a[2, 0] > 0
    assert np.all(a >= 0)


def test_induction_validation():
    with pytest.raises(ValueError):
        induction(np.eye(2), tau=0.0)
    with pytest.raises(ValueError):
        induction(np.eye(2), leak=-1.0)


@pytest.mark.parametrize(
    "a, expected",
    [(2 * np.eye(3), np.eye(3)), (np.diag([3.0, 1.0]), np.diag([1.0, 1.0 / 3.0]))],
)
def test_normalize_spectral(a, expected):
    np.testing.assert_allclose(normalize_spectral(a), expected, rtol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_normalize_spectral_power_iteration(seed):
    rng = np.random.default_rng(seed)
    a = normalize_spectral(rng.random((8, 8)))
    x = np.ones(8)
    for _ in range(500):
        x = a @ x
        x /= np.linalg.norm(x)
    assert np.linalg.norm(a @ x) == pytest.approx(1.0, abs=1e-9)


def test_normalize_nilpotent():
    with pytest.raises(DimensionError, match="nilpotent"):
        normalize_spectral(np.diag([1.0], 1))


def test_convert_dispatch():
    raw = generate(GeneratorConfig("ring", 5))
    a, tag = convert(raw, "transmission")
    assert tag == TRANSMISSION_FORMULA
    _, tag = convert(raw, "induction", tau=0.5)
    assert tag == INDUCTION_FORMULA
    a, _ = convert(raw, "none")
    np.testing.assert_array_equal(a, raw.c)
    with pytest.raises(ValueError):
        convert(raw, "diffusion")


def test_random_connectivity_undirected():
    raw = random_connectivity(10, 0.5, np.random.default_rng(0), directed=False)
    np.testing.assert_array_equal(raw.c, raw.c.T)
    assert not np.diag(raw.c).any()
