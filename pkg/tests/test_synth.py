import numpy as np
import pytest

from ocmeta.errors import ConfigError
from ocmeta.synth import SynthConfig, generate_synthetic, make_tasks


def test_config_validation():
    with pytest.raises(ConfigError):
        SynthConfig(n_tasks=1, dim=4, samples_per_class=10, separation=4.0)
    with pytest.raises(ConfigError):
        SynthConfig(n_tasks=3, dim=0, samples_per_class=10, separation=4.0)
    with pytest.raises(ConfigError):
        SynthConfig(n_tasks=3, dim=4, samples_per_class=0, separation=4.0)
    with pytest.raises(ConfigError):
        SynthConfig(n_tasks=3, dim=4, samples_per_class=10, separation=0.0)


def test_make_tasks_shapes_and_labels():
    cfg = SynthConfig(n_tasks=4, dim=6, samples_per_class=25, separation=5.0, seed=3)
    tasks = make_tasks(cfg)
    assert [t.task_id for t in tasks] == ["task0", "task1", "task2", "task3"]
    for t in tasks:
        assert t.features.shape == (50, 6)
        assert int(np.sum(t.labels == 1)) == 25
        assert int(np.sum(t.labels == -1)) == 25


def test_task_id_width_grows_with_count():
    cfg = SynthConfig(n_tasks=11, dim=24, samples_per_class=3, separation=3.0, seed=0)
    tasks = make_tasks(cfg)
    assert tasks[0].task_id == "task00"
    assert tasks[10].task_id == "task10"


def test_make_tasks_is_deterministic():
    cfg = SynthConfig(n_tasks=3, dim=5, samples_per_class=12, separation=5.0, seed=9)
    t1 = make_tasks(cfg)
    t2 = make_tasks(cfg)
    for a, b in zip(t1, t2):
        assert a.task_id == b.task_id
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)


def test_class_means_are_separated():
    cfg = SynthConfig(n_tasks=5, dim=8, samples_per_class=200, separation=6.0, seed=1)
    tasks = make_tasks(cfg)
    means = [t.features[t.labels == 1].mean(axis=0) for t in tasks]
    for i in range(len(means)):
        for j in range(i + 1, len(means)):
            # sample means sit near the true means, which are >= 6 apart
            assert np.linalg.norm(means[i] - means[j]) > 4.0


def test_out_of_distribution_rows_come_from_other_tasks():
    cfg = SynthConfig(n_tasks=3, dim=4, samples_per_class=300, separation=10.0, seed=2)
    tasks = make_tasks(cfg)
    for t in tasks:
        own = t.features[t.labels == 1].mean(axis=0)
        other = t.features[t.labels == -1]
        dists = np.linalg.norm(other - own, axis=1)
        # noisy copies of other tasks' rows stay far from this task's mean
        assert np.median(dists) > 5.0


def test_impossible_placement_is_a_config_error():
    cfg = SynthConfig(n_tasks=12, dim=1, samples_per_class=2, separation=4.0, seed=0)
    with pytest.raises(ConfigError):
        make_tasks(cfg)


def test_generate_synthetic_writes_byte_identical_files(tmp_path):
    cfg = SynthConfig(n_tasks=3, dim=4, samples_per_class=8, separation=5.0, seed=4)
    d1, d2 = tmp_path / "a", tmp_path / "b"
    d1.mkdir()
    d2.mkdir()
    paths1 = generate_synthetic(cfg, d1)
    paths2 = generate_synthetic(cfg, d2)
    assert [p.name for p in paths1] == ["task0.csv", "task1.csv", "task2.csv"]
    for p1, p2 in zip(paths1, paths2):
        assert p1.read_bytes() == p2.read_bytes()
