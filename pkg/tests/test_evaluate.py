from dataclasses import replace

import numpy as np
import pytest

from helpers import toy_tasks
from ocmeta.data import save_task
from ocmeta.errors import DataError
from ocmeta.evaluate import (
    draw_support,
    eval_loo,
    meta_auc_for_task,
    oc_auc_for_task,
    stable_hash,
    task_seed,
    write_results,
)
from ocmeta.meta import MetaConfig, adapt_and_score, meta_train
from ocmeta.metrics import auc
from ocmeta.svdd import TrainConfig, score, train_svdd


def test_stable_hash_published_vectors():
    assert stable_hash("") == 0xCBF29CE484222325
    assert stable_hash("a") == 0xAF63DC4C8601EC8C
    assert stable_hash("foobar") == 0x85944171F73967E8


def test_task_seed_separates_roles_and_tasks():
    seeds = {
        task_seed(0, "t0", "oc"),
        task_seed(0, "t0", "meta"),
        task_seed(0, "t0", "support"),
        task_seed(0, "t1", "oc"),
    }
    assert len(seeds) == 4
    assert task_seed(5, "t0", "oc") == (task_seed(0, "t0", "oc") + 5) & (2**64 - 1)


def test_draw_support_properties():
    task = toy_tasks()[0]
    sup, rest = draw_support(task, 6, seed=42)
    assert sup.shape == (6,)
    assert np.all(task.labels[sup] == 1)
    assert len(np.intersect1d(sup, rest)) == 0
    assert len(sup) + len(rest) == task.features.shape[0]
    sup2, rest2 = draw_support(task, 6, seed=42)
    assert np.array_equal(sup, sup2) and np.array_equal(rest, rest2)
    sup3, _ = draw_support(task, 6, seed=43)
    assert not np.array_equal(sup, sup3)


def test_draw_support_needs_spare_positives():
    task = toy_tasks(per_class=6)[0]
    with pytest.raises(DataError):
        draw_support(task, 6, seed=0)


def _tiny_train_config():
    return TrainConfig(batch_size=8, lr=1e-3, epochs=2, latent_dim=4, seed=0)


def _tiny_meta_config(**overrides):
    base = dict(
        posterior_samples=2,
        meta_batch=2,
        eta=1.0,
        support_size=5,
        query_in=4,
        query_out=4,
        lr=1e-3,
        meta_steps=3,
        seed=0,
        latent_dim=4,
        inference_hidden=(8, 8),
    )
    base.update(overrides)
    return MetaConfig(**base)


def test_oc_auc_for_task_matches_manual_wiring():
    task = toy_tasks()[0]
    cfg = _tiny_train_config()
    got = oc_auc_for_task(task, cfg)
    manual_cfg = replace(cfg, seed=task_seed(cfg.seed, task.task_id, "oc"))
    model, _ = train_svdd(task.features[task.labels == 1], manual_cfg)
    expected = auc(score(task.features, model), task.labels)
    assert got == expected


def test_meta_auc_for_task_matches_manual_wiring():
    tasks = toy_tasks()
    mcfg = _tiny_meta_config()
    trunk, phi, _ = meta_train(tasks[1:], [], mcfg, hidden_dims=(8,))
    got = meta_auc_for_task(tasks[0], trunk, phi, mcfg)
    seed = task_seed(mcfg.seed, tasks[0].task_id, "support")
    sup, rest = draw_support(tasks[0], mcfg.support_size, seed)
    scores = adapt_and_score(tasks[0].features[sup], tasks[0].features[rest], trunk, phi)
    expected = auc(scores, tasks[0].labels[rest])
    assert got == expected


def test_write_results_format(tmp_path):
    p = tmp_path / "results.csv"
    write_results(p, [("a", 0.98765, 0.5), ("b", 1.0, 0.333333)])
    assert p.read_text() == (
        "task_id,oc_svdd_auc,meta_svdd_auc\na,0.9877,0.5000\nb,1.0000,0.3333\n"
    )


def test_eval_loo_end_to_end(tmp_path):
    tasks = toy_tasks()
    out = tmp_path / "results.csv"
    rows = eval_loo(
        tasks, _tiny_train_config(), _tiny_meta_config(), out_path=out, hidden_dims=(8,)
    )
    assert [r[0] for r in rows] == sorted(t.task_id for t in tasks)
    for _, oc_auc_val, meta_auc_val in rows:
        assert 0.0 <= oc_auc_val <= 1.0
        assert 0.0 <= meta_auc_val <= 1.0
    text1 = out.read_text()
    assert text1.startswith("task_id,oc_svdd_auc,meta_svdd_auc\n")

    eval_loo(
        tasks, _tiny_train_config(), _tiny_meta_config(), out_path=out, hidden_dims=(8,)
    )
    assert out.read_text() == text1


def test_eval_loo_accepts_a_directory(tmp_path):
    d = tmp_path / "tasks"
    d.mkdir()
    for t in toy_tasks():
        save_task(d / f"{t.task_id}.csv", t)
    rows = eval_loo(
        str(d), _tiny_train_config(), _tiny_meta_config(), hidden_dims=(8,)
    )
    assert len(rows) == 3


def test_eval_loo_needs_three_tasks():
    with pytest.raises(DataError):
        eval_loo(toy_tasks()[:2], _tiny_train_config(), _tiny_meta_config())


def test_eval_loo_shared_meta_mode(tmp_path):
    tasks = toy_tasks()
    r1 = eval_loo(
        tasks,
        _tiny_train_config(),
        _tiny_meta_config(),
        shared_meta=True,
        hidden_dims=(8,),
    )
    r2 = eval_loo(
        tasks,
        _tiny_train_config(),
        _tiny_meta_config(),
        shared_meta=True,
        hidden_dims=(8,),
    )
    assert r1 == r2
    assert len(r1) == 3


def test_held_out_rows_cannot_influence_the_adapted_model():
    """Leave-one-out isolation: only the support rows of the evaluated task
    may reach the adapted model, so perturbing its held-out rows leaves the
    posterior (and the trained trunk and inference net) bitwise unchanged."""
    from ocmeta.meta import infer_posterior, phi_param_arrays, trunk_param_arrays

    mcfg = _tiny_meta_config()
    tasks = toy_tasks()
    target = tasks[0].task_id
    seed = task_seed(mcfg.seed, target, "support")

    def adapted(task_list):
        cfg = replace(mcfg, seed=task_seed(mcfg.seed, target, "meta"))
        trunk, phi, _ = meta_train(task_list, (target,), cfg, hidden_dims=(8,))
        sup, _ = draw_support(task_list[0], mcfg.support_size, seed)
        posterior = infer_posterior(task_list[0].features[sup], trunk, phi)
        return trunk, phi, posterior

    trunk1, phi1, post1 = adapted(tasks)
    perturbed = toy_tasks()
    sup, rest = draw_support(perturbed[0], mcfg.support_size, seed)
    perturbed[0].features[rest] += 1e6
    trunk2, phi2, post2 = adapted(perturbed)

    for a, b in zip(trunk_param_arrays(trunk1), trunk_param_arrays(trunk2)):
        assert np.array_equal(a, b)
    for a, b in zip(phi_param_arrays(phi1), phi_param_arrays(phi2)):
        assert np.array_equal(a, b)
    assert np.array_equal(post1.mu, post2.mu)
    assert np.array_equal(post1.logvar, post2.logvar)


def test_eval_loo_annotates_failures_with_task_id():
    tasks = toy_tasks(per_class=12)
    bad = _tiny_meta_config(support_size=12)  # no spare in-distribution rows
    with pytest.raises(DataError) as e:
        eval_loo(tasks, _tiny_train_config(), bad, hidden_dims=(8,))
    assert "task" in str(e.value) and "toy" in str(e.value)
