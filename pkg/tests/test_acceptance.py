"""Acceptance suite: every exit criterion at its pinned tolerance.

Each test prints one PASS/FAIL line with its runtime.  The final test
checks the whole-suite time budget, so this module is meant to run in
file order (plain pytest does).
"""

import contextlib
import json
import math
import time

import numpy as np
from numpy.testing import assert_allclose

from geoswarm.cli import main
from geoswarm.config import PRESET_NAMES, preset_config
from geoswarm.edmd import SnapshotBuffer, fit, pseudoinverse, run_streaming
from geoswarm.formation import (
    ExtensionSpec,
    Side,
    extension_path,
    ideal_follower_trajectory,
    orthogonal_direction,
    path_arclength,
)
from geoswarm.geodesics import integrate, leader_trajectory, riemannian_speed
from geoswarm.observables import Dictionary
from geoswarm.scenario import (
    build_geometry,
    compare_dictionaries,
    practical_modes,
    run_scenario,
    sensing_range,
)
from geoswarm.surfaces import Surface, inner

_SUITE_T0 = time.monotonic()
SUITE_BUDGET_SECONDS = 60.0

TYPE1 = Surface.elliptic_paraboloid()
TYPE2 = Surface.hyperbolic_paraboloid()
TYPE3 = Surface.trig_waves()
FLAT = Surface.flat()
BUILTINS = [TYPE1, TYPE2, TYPE3]
INIT1 = (50.0, -10.0, -math.cos(math.pi / 36), math.sin(math.pi / 36))


@contextlib.contextmanager
def criterion(name, budget=None):
    t0 = time.monotonic()
    try:
        yield
    except BaseException:
        print(f"FAIL  {name}  ({time.monotonic() - t0:.2f} s)")
        raise
    elapsed = time.monotonic() - t0
    if budget is not None:
        assert elapsed < budget, f"{name} took {elapsed:.2f} s, budget {budget} s"
    print(f"PASS  {name}  ({elapsed:.2f} s)")


def fd_christoffel(surface, p, h=1e-5):
    """Independent oracle: finite differences of the metric through the
    defining formula for the connection coefficients."""
    x, y = p

    def g_mat(a, b):
        return surface.metric_at((a, b)).matrix

    dg = np.empty((2, 2, 2))
    dg[0] = (g_mat(x + h, y) - g_mat(x - h, y)) / (2 * h)
    dg[1] = (g_mat(x, y + h) - g_mat(x, y - h)) / (2 * h)
    g_inv = np.linalg.inv(g_mat(x, y))
    gamma = np.empty((2, 2, 2))
    for a in range(2):
        for b in range(2):
            for c in range(2):
                gamma[a, b, c] = 0.5 * sum(
                    g_inv[a, d] * (dg[c, d, b] + dg[b, d, c] - dg[d, b, c]) for d in range(2)
                )
    return gamma


def test_geometry_oracle_suite():
    with criterion("geometry oracle suite", budget=1.0):
        rng = np.random.default_rng(101)
        for surface in BUILTINS:
            for _ in range(100):
                p = rng.uniform(-60, 60, size=2)
                assert_allclose(
                    surface.christoffel_at(p).array, fd_christoffel(surface, p), atol=1e-6
                )
        critical = [
            (TYPE1, (0.0, 0.0)),
            (TYPE2, (0.0, 0.0)),
            (TYPE3, (3 * math.pi / 2, 0.0)),
            (TYPE3, (-3 * math.pi / 2, 3 * math.pi)),
        ]
        for surface, p in critical:
            assert np.max(np.abs(surface.christoffel_at(p).array)) <= 1e-12


def test_geodesic_suite():
    with criterion("geodesic suite", budget=5.0):
        flat = integrate(FLAT, (0, 0, 1, 0), duration=5.0, h=0.01)
        assert np.max(np.abs(flat.final - np.array([5, 0, 1, 0]))) <= 1e-9

        traj = integrate(TYPE1, INIT1, duration=36 * 1.28, h=0.01)
        speeds = np.array([riemannian_speed(TYPE1, s) for s in traj.states])
        assert np.max(np.abs(speeds - speeds[0])) / speeds[0] <= 1e-6

        ref = integrate(TYPE3, (30, 5, 1, 0), duration=4.0, h=0.01).final
        err_coarse = np.linalg.norm(integrate(TYPE3, (30, 5, 1, 0), 4.0, h=0.08).final - ref)
        err_fine = np.linalg.norm(integrate(TYPE3, (30, 5, 1, 0), 4.0, h=0.04).final - ref)
        assert err_coarse / err_fine >= 8.0


def test_formation_suite():
    with criterion("formation suite"):
        for name in PRESET_NAMES:
            cfg = preset_config(name)
            leader = leader_trajectory(
                cfg.surface, cfg.leader_init, cfg.steps, cfg.extension.period, cfg.step
            )
            ideal = ideal_follower_trajectory(cfg.surface, leader, cfg.extension)
            assert len(ideal) == cfg.steps + 1
            for state in ideal.leader_states:
                times, states = extension_path(cfg.surface, state, cfg.extension, cfg.step)
                length = path_arclength(cfg.surface, times, states)
                assert abs(length - 3.57) / 3.57 <= 1e-6
                g = cfg.surface.metric_at(state[:2])
                v = orthogonal_direction(cfg.surface, state[:2], state[2:], cfg.extension.side)
                assert abs(inner(g, v, state[2:])) <= 1e-10 * np.linalg.norm(state[2:])

        flat_leader = leader_trajectory(FLAT, (0, 0, 1, 0), 6, 1.0, h=0.01)
        ext = ExtensionSpec(length=3.57, side=Side.LEFT, period=1.0)
        flat_ideal = ideal_follower_trajectory(FLAT, flat_leader, ext)
        offset = flat_ideal.leader_states[:, :2] + np.array([0.0, 3.57])
        assert np.max(np.abs(flat_ideal.positions - offset)) <= 1e-9


def test_edmd_oracle_suite():
    with criterion("edmd oracle suite"):
        rng = np.random.default_rng(103)
        for i in range(50):
            M = rng.normal(size=(int(rng.integers(1, 7)), int(rng.integers(1, 11))))
            if i % 4 == 0 and M.shape[0] > 1:
                M[-1] = 2.0 * M[0]  # rank-deficient cases included
            P = pseudoinverse(M)
            assert np.max(np.abs(M @ P @ M - M)) <= 1e-8
            assert np.max(np.abs(P @ M @ P - P)) <= 1e-8
            assert np.max(np.abs((M @ P).T - M @ P)) <= 1e-8
            assert np.max(np.abs((P @ M).T - P @ M)) <= 1e-8

        for k in (2, 3):
            A = np.eye(k) + 0.1 * rng.normal(size=(k, k))
            xs = rng.normal(size=(2 * k, k))
            buf = SnapshotBuffer.from_pairs([(x, A @ x) for x in xs])
            assert np.max(np.abs(fit(buf) - A)) <= 1e-8

        X = rng.normal(size=(3, 8))
        Y = rng.normal(size=(3, 8))
        buf = SnapshotBuffer(3)
        for j in range(8):
            buf.append_pair(X[:, j], Y[:, j])
        K = fit(buf)
        K_ne = Y @ X.T @ np.linalg.inv(X @ X.T)
        assert abs(np.linalg.norm(Y - K @ X) - np.linalg.norm(Y - K_ne @ X)) <= 1e-8

        c = np.array([1.28, -0.4])
        results = run_streaming([(c, c)] * 4, steps=20, oracle=lambda _p: c)
        assert all(np.max(np.abs(pred - c)) <= 1e-10 for pred, _ in results)


def test_effectiveness_sensing_range_direction():
    with criterion("sensing range: estimation shrinks it on every preset", budget=10.0):
        for name in PRESET_NAMES:
            cfg = preset_config(name)
            geom = build_geometry(cfg)
            with_est = sensing_range(cfg, True, geom)
            without = sensing_range(cfg, False, geom)
            assert math.isfinite(with_est) and math.isfinite(without)
            assert with_est < without, f"{name}: {with_est} !< {without}"


def test_dictionary_comparison_direction():
    with criterion("dictionary comparison: local beats absolute"):
        values = {}
        for name in PRESET_NAMES:
            rows = dict(
                compare_dictionaries(
                    preset_config(name), [Dictionary.RELATIVE, Dictionary.FOLLOWER_POS_2D]
                )
            )
            values[name] = (rows[Dictionary.RELATIVE], rows[Dictionary.FOLLOWER_POS_2D])
        b1, d1 = values["type1"]
        assert b1 < d1, f"type1: {b1} !< {d1}"
        for name in ("type2", "type3"):
            b, d = values[name]
            assert b <= d, f"{name}: {b} !<= {d}"


def test_practical_modes_direction():
    with criterion("practical modes: relative-only stays best"):
        for name in PRESET_NAMES:
            rows = dict(practical_modes(preset_config(name)))
            none = rows.pop([m for m in rows if m.value == "none"][0])
            assert math.isfinite(none)
            for mode, value in rows.items():
                assert math.isfinite(value), f"{name}/{mode.value} not finite"
                assert none <= value, f"{name}: none={none} !<= {mode.value}={value}"


def test_simulate_determinism(tmp_path):
    with criterion("simulate is byte-deterministic"):
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        for out in (out1, out2):
            code = main(["simulate", "--preset", "type1", "--outdir", str(out), "--no-figure"])
            assert code == 0
        csv1 = (out1 / "run.csv").read_bytes()
        csv2 = (out2 / "run.csv").read_bytes()
        json1 = (out1 / "summary.json").read_bytes()
        json2 = (out2 / "summary.json").read_bytes()
        assert csv1 == csv2
        assert json1 == json2
        payload = json.loads(json1)
        assert set(payload) == {"rmse", "avg_sensing_range", "config"}


def test_suite_time_budget():
    elapsed = time.monotonic() - _SUITE_T0
    with criterion("acceptance suite time budget"):
        assert elapsed < SUITE_BUDGET_SECONDS, f"suite took {elapsed:.1f} s"
    print(f"total acceptance time: {elapsed:.2f} s")
