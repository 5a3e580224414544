import numpy as np
import pytest
from sklearn.base import clone

from fmanneal.annealer import (
    AnnealConfig,
    SimulatedAnnealingSampler,
    _read_seeds,
    anneal_read,
    brute_force_qubo,
    sample,
)
from fmanneal.exceptions import BudgetExceededError
from fmanneal.fm import Qubo, qubo_evaluate


def random_qubo(rng, n):
    return Qubo(0.0, np.triu(rng.uniform(-1, 1, (n, n))))


def reference_read(q, cfg, seed):
    """Slow single read with full re-evaluation of every proposal.

    Seeded like the compiled kernel (legacy MT19937 stream), so with exact
    arithmetic it must visit the same states.
    """
    n = q.n
    np.random.seed(seed)
    x = np.array([1 if np.random.random() < 0.5 else 0 for _ in range(n)])
    e = qubo_evaluate(q, x)
    best, best_e = x.copy(), e
    for beta in cfg.betas():
        for _ in range(cfg.inner_loops):
            for i in range(n):
                y = x.copy()
                y[i] = 1 - y[i]
                delta = qubo_evaluate(q, y) - e
                if delta > 0 and np.random.random() >= np.exp(-beta * delta):
                    continue
                x, e = y, e + delta
                if e < best_e:
                    best, best_e = x.copy(), e
    return best


def test_config_validation():
    with pytest.raises(ValueError):
        AnnealConfig(beta_initial=2.0, beta_final=1.0)
    with pytest.raises(ValueError):
        AnnealConfig(outer_loops=0)
    with pytest.raises(ValueError):
        AnnealConfig(schedule="geometric")


def test_linear_schedule():
    b = AnnealConfig(beta_initial=1.0, beta_final=3.0, outer_loops=3).betas()
    assert b.tolist() == [1.0, 2.0, 3.0]
    assert AnnealConfig(outer_loops=1).betas().tolist() == [1e-5]
    b = AnnealConfig().betas()
    assert b[0] == 1e-5 and b[-1] == 100.0 and len(b) == 1000


def test_single_variable():
    x, e = anneal_read(Qubo(0.5, [[-1.0]]), AnnealConfig(outer_loops=10), 0)
    assert x.tolist() == [1]
    assert e == -0.5


def test_positive_diagonal():
    x, e = anneal_read(Qubo(0.0, np.eye(2)), AnnealConfig(outer_loops=10), 3)
    assert x.tolist() == [0, 0] and e == 0.0


def test_sample_set_sorted_and_consistent(rng):
    q = random_qubo(rng, 12)
    ss = sample(q, AnnealConfig(outer_loops=50, num_reads=15), 9)
    assert len(ss) == 15
    assert np.all(np.diff(ss.energies) >= 0)
    assert sorted(ss.read_index.tolist()) == list(range(15))
    for x, e in ss:
        assert e == pytest.approx(qubo_evaluate(q, x), rel=1e-9, abs=1e-12)


def test_ties_keep_read_order():
    ss = sample(Qubo(0.0, np.eye(3)), AnnealConfig(outer_loops=20, num_reads=6), 1)
    assert np.all(ss.energies == 0.0)
    assert ss.read_index.tolist() == list(range(6))


def test_singleton_and_determinism(rng):
    q = random_qubo(rng, 8)
    cfg = AnnealConfig(outer_loops=30, num_reads=1)
    assert len(sample(q, cfg, 4)) == 1
    cfg = AnnealConfig(outer_loops=30)
    assert sample(q, cfg, 4) == sample(q, cfg, 4)
    assert anneal_read(q, cfg, 5)[0].tolist() == sample(q, AnnealConfig(outer_loops=30, num_reads=1), 5).states[0].tolist()


def test_reads_independent_of_read_count(rng):
    # read r only depends on (seed, r)
    q = random_qubo(rng, 8)
    a = sample(q, AnnealConfig(outer_loops=20, num_reads=3), 11)
    b = sample(q, AnnealConfig(outer_loops=20, num_reads=7), 11)
    a_by_read = {int(r): s.tolist() for r, s in zip(a.read_index, a.states)}
    b_by_read = {int(r): s.tolist() for r, s in zip(b.read_index, b.states)}
    for r in range(3):
        assert a_by_read[r] == b_by_read[r]


@pytest.mark.parametrize("seed", range(5))
def test_incremental_delta_matches_full_reevaluation(seed):
    rng = np.random.default_rng(seed)
    q = Qubo(0.0, np.triu(rng.integers(-4, 5, (6, 6)).astype(float)))
    cfg = AnnealConfig(beta_initial=0.1, beta_final=2.0, outer_loops=15, inner_loops=2, num_reads=1)
    expected = reference_read(q, cfg, _read_seeds(seed, 1)[0])
    got, _ = anneal_read(q, cfg, seed)
    assert got.tolist() == expected.tolist()


def test_diagonal_qubo_solved_every_read(rng):
    d = rng.uniform(-1, 1, 20)
    q = Qubo(0.0, np.diag(d))
    ss = sample(q, AnnealConfig(), 0)
    expected = (d < 0).astype(int).tolist()
    for x, _ in ss:
        assert x.tolist() == expected


def test_more_sweeps_never_worse_on_average():
    rng = np.random.default_rng(77)
    short, long = [], []
    for s in range(100):
        q = random_qubo(rng, 10)
        short.append(anneal_read(q, AnnealConfig(outer_loops=10), s)[1])
        long.append(anneal_read(q, AnnealConfig(outer_loops=1000), s)[1])
    assert np.mean(long) <= np.mean(short)


def test_brute_force_examples():
    x, e = brute_force_qubo(Qubo(2.0, np.zeros((3, 3))))
    assert x.tolist() == [0, 0, 0] and e == 2.0
    x, e = brute_force_qubo(Qubo(0.0, np.diag([-1.0, 2.0])))
    assert x.tolist() == [1, 0] and e == -1.0
    x, e = brute_force_qubo(Qubo(0.0, [[-1.0, 3.0], [0.0, -1.0]]))
    assert x.tolist() == [0, 1] and e == -1.0


def test_brute_force_matches_enumeration(rng):
    import itertools

    q = random_qubo(rng, 8)
    best = min(itertools.product((0, 1), repeat=8), key=lambda x: (qubo_evaluate(q, x), x))
    x, e = brute_force_qubo(q)
    assert tuple(x) == best
    assert e == qubo_evaluate(q, best)


def test_brute_force_cap():
    with pytest.raises(BudgetExceededError):
        brute_force_qubo(Qubo(0.0, np.zeros((25, 25))))


def test_sampler_estimator():
    s = SimulatedAnnealingSampler(outer_loops=20, num_reads=4, random_state=3)
    assert s.get_params()["outer_loops"] == 20
    c = clone(s).set_params(num_reads=2)
    q = Qubo(0.0, -np.eye(4))
    assert len(c.sample(q)) == 2
    assert s.sample(q) == sample(q, AnnealConfig(outer_loops=20, num_reads=4), 3)
