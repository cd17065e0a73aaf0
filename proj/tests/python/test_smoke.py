import math

import numpy as np
import pytest

import grfmcmc


def make_lattice():
    lat = grfmcmc.SpinLattice(3, 3, 1)
    lat.set(1, 1, -1)
    lat.set(0, 2, -1)
    return lat


def test_model_and_suffstats():
    model = grfmcmc.GrfModel.ising(3, 3)
    lat = make_lattice()
    s = model.suffstats(lat)
    assert s.shape == (1,)
    # 12 free-boundary bonds; the two flipped cells leave 6 agreeing and
    # 6 disagreeing pairs
    assert s[0] == 0.0


def test_transfer_matches_brute_force():
    model = grfmcmc.GrfModel.ising(3, 3)
    theta = np.array([0.3])
    assert grfmcmc.ising_transfer_log_z(3, 3, 0.3) == pytest.approx(
        grfmcmc.brute_force_log_z(model, theta), abs=1e-10
    )


def test_posterior_grid_normalised():
    model = grfmcmc.GrfModel.ising(3, 3)
    grid = grfmcmc.exact_posterior_grid(model, make_lattice(), -1.0, 1.0, 201)
    trapezoid = getattr(np, "trapezoid", getattr(np, "trapz", None))
    assert trapezoid(grid.density, grid.grid) == pytest.approx(1.0, abs=1e-9)
    assert grid.cdf_at(1.0) == pytest.approx(1.0, abs=1e-9)
    q = grfmcmc.grid_summaries(grid)
    assert grid.grid[0] <= q.argmax <= grid.grid[-1]


def test_run_chain_deterministic():
    model = grfmcmc.GrfModel.ising(3, 3)
    lat = make_lattice()
    cfg = grfmcmc.SamplerConfig()
    cfg.aux_burnin = 30
    cfg.aux_thin = 0
    cfg.rw_scale = 0.4
    cfg.seed = 5
    cfg.budget.iterations = 150
    t1 = grfmcmc.run_chain("exchange", model, lat, cfg)
    t2 = grfmcmc.run_chain("exchange", model, lat, cfg)
    assert t1.thetas.shape == (151, 1)
    assert np.array_equal(t1.thetas, t2.thetas)
    assert 0.0 <= t1.acceptance_rate() <= 1.0
    summary = grfmcmc.trace_summaries(t1)
    assert summary.ess[0] > 0.0


def test_mala_needs_step_matrix():
    model = grfmcmc.GrfModel.ising(3, 3)
    cfg = grfmcmc.SamplerConfig()
    cfg.budget.iterations = 10
    with pytest.raises(ValueError):
        grfmcmc.run_chain("mala-exchange", model, make_lattice(), cfg)


def test_oracle_refusal():
    model = grfmcmc.GrfModel.ergm(9, ["edges", "triangles"])
    cfg = grfmcmc.SamplerConfig()
    cfg.budget.iterations = 10
    with pytest.raises(grfmcmc.OracleRefusal):
        grfmcmc.run_chain("exact-mh", model, model.reference_state(), cfg)


def test_perturbation_bound_holds():
    rng = np.random.default_rng(3)
    p = rng.dirichlet(np.ones(5), size=5)
    rep = grfmcmc.verify_perturbation(p, p, 40)
    assert not rep.violated
    assert rep.kappa == 0.0

    cert = grfmcmc.ergodicity_cert(p)
    assert 0.0 < cert.rho < 1.0
    assert cert.method in ("dobrushin", "minorization")


def test_theorem3_halving():
    a = grfmcmc.theorem3_constants(2.0, 3.0, 4.0, 100.0)
    b = grfmcmc.theorem3_constants(2.0, 3.0, 4.0, 400.0)
    assert a.total_bound == 2.0 * b.total_bound


def test_lattice_io_roundtrip(tmp_path):
    lat = make_lattice()
    path = str(tmp_path / "lat.txt")
    grfmcmc.save_lattice(lat, path)
    assert grfmcmc.load_lattice(path) == lat


def test_graph_suffstats():
    g = grfmcmc.UndirectedGraph(4)
    g.set_edge(0, 1, True)
    g.set_edge(1, 2, True)
    g.set_edge(2, 3, True)
    model = grfmcmc.GrfModel.ergm(4, ["edges", "two-stars"])
    s = model.suffstats(g)
    assert list(s) == [3.0, 2.0]


def test_draw_auxiliary_stats_shape():
    model = grfmcmc.GrfModel.ising(4, 4)
    stats = grfmcmc.draw_auxiliary_stats(model, np.array([0.2]), 8, 25, 2, seed=11)
    assert stats.shape == (8, 1)
    assert math.isfinite(stats.sum())
