import math
from dataclasses import replace

import pytest

import cfo.sweep as sweep_mod
from cfo.engine import CfoParams, RunRecord
from cfo.errors import ConfigurationError
from cfo.sweep import REFERENCE_PROFILE, SweepConfig, run_sweep, table1_row


def small(fid="F16", **kw):
    base = dict(probes_per_axis_min=2, probes_per_axis_max=4, gamma_start=0.2, gamma_stop=0.6, gamma_count=3)
    base.update(kw)
    return SweepConfig(fid, **base)


def test_gamma_grid():
    cfg = SweepConfig.paper_grid("F1")
    g = cfg.gammas()
    assert len(g) == 11 and g[0] == 0 and g[-1] == 1
    assert all(math.isclose(v, k / 10, abs_tol=1e-15) for k, v in enumerate(g))


@pytest.mark.parametrize("fid,runs,ppa_max", [("F1", 33, 6), ("F13", 33, 6), ("F19", 77, 14), ("F14", 77, 14)])
def test_paper_grid_sizes(fid, runs, ppa_max):
    cfg = SweepConfig.paper_grid(fid)
    assert len(cfg.grid()) == runs
    assert cfg.probes_per_axis() == list(range(2, ppa_max + 1, 2))
    assert cfg.base.nt == 1000


def test_paper_grid_profile_and_f7_steps():
    cfg = SweepConfig.paper_grid("F7")
    assert cfg.base.nt == 100
    for key, value in REFERENCE_PROFILE.items():
        assert getattr(cfg.base, key) == value
    plain = SweepConfig.paper_grid("F7", base=CfoParams())
    assert plain.base.precision == "double" and plain.base.nt == 100


def test_run_numbers_reconstruct_grid_point():
    cfg = SweepConfig.paper_grid("F20")
    gammas = cfg.gammas()
    for n, ppa, g in cfg.grid():
        axis_index, gamma_index = divmod(n - 1, 11)
        assert ppa == 2 + 2 * axis_index and g == gammas[gamma_index]


@pytest.mark.parametrize(
    "kw",
    [dict(probes_per_axis_min=1), dict(probes_per_axis_max=1), dict(gamma_count=0), dict(gamma_stop=1.5), dict(probes_per_axis_step=0)],
)
def test_bad_config(kw):
    with pytest.raises(ConfigurationError):
        small(**kw)


def test_unknown_function_in_config():
    with pytest.raises(KeyError):
        SweepConfig("F0")


def test_degenerate_sweep():
    cfg = small(probes_per_axis_max=2, gamma_count=1, gamma_start=0.5, gamma_stop=0.5)
    res = run_sweep(cfg)
    assert len(res.records) == 1
    assert res.total_neval == res.records[0].neval
    assert res.rerun_record == res.best_record == res.records[0]


def test_small_sweep_bookkeeping():
    res = run_sweep(small())
    assert [r.run_number for r in res.records] == list(range(1, 7))
    assert res.total_neval == sum(r.neval for r in res.records)
    assert res.best_record.best_fitness == max(r.best_fitness for r in res.records)
    assert res.rerun_record.best_fitness == res.best_record.best_fitness
    assert res.rerun_record.as_dict() == res.best_record.as_dict()
    assert res.valid and res.error is None


def test_parallel_matches_serial():
    serial = run_sweep(small("F17"))
    parallel = run_sweep(small("F17", workers=2))
    assert serial.records == parallel.records
    assert serial.best_run_number == parallel.best_run_number


def _fake_record(n, fitness):
    return RunRecord(n, 0.0, 10, 2, 4, 2.0, 1.0, 2.0, 2.0, 35, 144, 0.5, fitness, 1, 0, probes_per_axis=2)


def test_ties_go_to_the_later_run(monkeypatch):
    values = {1: 1.0, 2: 3.0, 3: 2.0, 4: 3.0, 5: 3.0, 6: 0.0}
    monkeypatch.setattr(sweep_mod, "_one", lambda job, trace=False: _fake_record(job[2], values[job[2]]))
    res = run_sweep(small())
    assert res.best_run_number == 5


def test_failure_marks_sweep_invalid(monkeypatch):
    real = sweep_mod._one

    def flaky(job, trace=False):
        if job[2] == 4:
            raise ConfigurationError("boom")
        return real(job, trace)

    monkeypatch.setattr(sweep_mod, "_one", flaky)
    res = run_sweep(small())
    assert not res.valid and "boom" in res.error
    assert [r.run_number for r in res.records] == [1, 2, 3]
    assert res.rerun_record is None


def test_table1_row():
    res = run_sweep(small())
    row = table1_row(res, "F16")
    best = res.best_record
    assert row.as_tuple() == (best.best_fitness, best.gamma, best.np // 2, best.neval, res.total_neval)
    with pytest.raises(ConfigurationError):
        table1_row(res, "F17")


def test_noisy_sweep_is_seeded():
    cfg = SweepConfig("F7", probes_per_axis_max=2, gamma_count=2, base=CfoParams(nt=20), seed=5)
    a, b = run_sweep(cfg), run_sweep(cfg)
    assert a.records == b.records
    c = run_sweep(replace(cfg, seed=6))
    assert [r.best_fitness for r in c.records] != [r.best_fitness for r in a.records]


def test_trace_of_best_run():
    res = run_sweep(small(), trace_best=True)
    assert res.best_trace is not None
    assert len(res.best_trace) == res.best_record.last_step + 1
    assert res.best_trace[-1].global_best == res.best_record.best_fitness
