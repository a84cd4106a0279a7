import numpy as np
import pytest

from ocmeta.errors import NumericError
from ocmeta.gradcheck import grad_check


def test_sum_of_squares():
    p = np.array([1.0, -2.0, 0.5])

    def loss_and_grad(params):
        (x,) = params
        return float(np.sum(x * x)), [2.0 * x]

    assert grad_check(loss_and_grad, [p], h=1e-4) <= 1e-6


def test_constant_loss():
    p = np.array([3.0, 4.0])

    def loss_and_grad(params):
        return 7.0, [np.zeros(2)]

    assert grad_check(loss_and_grad, [p], h=1e-4) <= 1e-6


def test_detects_wrong_gradient():
    p = np.array([1.0, 2.0])

    def loss_and_grad(params):
        (x,) = params
        return float(np.sum(x * x)), [3.0 * x]  # deliberately wrong

    assert grad_check(loss_and_grad, [p], h=1e-4) > 0.1


def test_non_finite_loss_raises():
    def loss_and_grad(params):
        return float("nan"), [np.zeros(1)]

    with pytest.raises(NumericError):
        grad_check(loss_and_grad, [np.zeros(1)], h=1e-4)


def test_non_finite_perturbed_loss_raises():
    p = np.array([1e-6])

    def loss_and_grad(params):
        (x,) = params
        with np.errstate(invalid="ignore"):
            return float(np.log(x[0])), [1.0 / x]

    # p - h goes negative, log() of it is nan
    with pytest.raises(NumericError):
        grad_check(loss_and_grad, [p], h=1e-4)


def test_forgives_disagreement_below_fd_resolution():
    # true slope 1e-12 is under the round-off resolution of the central
    # difference at h=1e-5; claiming a zero gradient must not fail
    p = np.array([0.5])

    def loss_and_grad(params):
        (x,) = params
        return float(x[0]) * 1e-12, [np.zeros(1)]

    assert grad_check(loss_and_grad, [p], h=1e-5) == 0.0


def test_still_catches_small_but_resolvable_errors():
    # slope 1e-6 is far above the resolution; a claimed zero gradient fails
    p = np.array([0.5])

    def loss_and_grad(params):
        (x,) = params
        return float(x[0]) * 1e-6, [np.zeros(1)]

    assert grad_check(loss_and_grad, [p], h=1e-5) > 0.1


def test_restores_params():
    p = np.array([1.0, 2.0])

    def loss_and_grad(params):
        (x,) = params
        return float(np.sum(x * x)), [2.0 * x]

    grad_check(loss_and_grad, [p], h=1e-4)
    assert np.array_equal(p, [1.0, 2.0])


def test_episodic_check_detects_corrupted_backward(monkeypatch):
    """The whole-model check must be able to fail: a 0.1% scaling of one
    gradient family has to push the error past the acceptance tolerance."""
    from ocmeta import gradcheck as gc
    from ocmeta import meta

    orig = meta.episode_loss

    def corrupted(*args, **kwargs):
        loss, tg, pg = orig(*args, **kwargs)
        return loss, tg, [(w * 1.001, b) for w, b in pg]

    monkeypatch.setattr(meta, "episode_loss", corrupted)
    assert gc.check_episodic(0) > 1e-4


def test_oneclass_check_detects_corrupted_backward(monkeypatch):
    from ocmeta import gradcheck as gc
    from ocmeta import svdd

    orig = svdd.svdd_loss

    def corrupted(latents, center):
        loss, grad = orig(latents, center)
        return loss, grad * 1.0005

    monkeypatch.setattr(svdd, "svdd_loss", corrupted)
    assert gc.check_oneclass(0) > 1e-4
