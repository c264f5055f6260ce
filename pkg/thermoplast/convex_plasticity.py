"""The von Mises admissible set, its projection and Yosida approximation.

All functions are vectorized: tensors have shape (..., 6) as in
`tensors`, and scalar helpers accept numpy arrays.

"""
from dataclasses import dataclass

import numpy as np

from .errors import NonPositiveParameterError
from .tensors import (
    deviator,
    norm,
)


# Below this deviatoric norm the flow direction PT/|PT| is taken as zero.
DIRECTION_GUARD = 1e-300


@dataclass(frozen=True)
class YieldSurface(object):
    """K = {T : |PT| <= k}."""

    k: float

    def __post_init__(self):
        if not self.k > 0:
            raise NonPositiveParameterError('flow.k', self.k)


@dataclass(frozen=True)
class YosidaParam(object):
    """The regularization parameter; also sets the truncation height."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise NonPositiveParameterError('flow.lambda', self.lam)

    @property
    def truncation_height(self):
        # type: () -> float
        return 1.0 / self.lam


def _deviator_and_norm(tensor):
    dev = deviator(tensor)
    return dev, norm(dev)


def _direction(dev, dev_norm):
    safe = np.where(dev_norm > DIRECTION_GUARD, dev_norm, 1.0)
    scale = np.where(dev_norm > DIRECTION_GUARD, 1.0 / safe, 0.0)
    return dev * scale[..., None]


def in_K(tensor, ys):
    # type: (np.ndarray, YieldSurface) -> np.ndarray
    _, dev_norm = _deviator_and_norm(tensor)
    return dev_norm <= ys.k


def project_K(tensor, ys):
    # type: (np.ndarray, YieldSurface) -> np.ndarray
    """Return the nearest point of K (radial return).

    The spherical part is kept and the deviatoric part is scaled
    back onto the cylinder |PT| = k when it lies outside.

    Args:
        tensor: Stresses of shape (..., 6).
        ys: The yield surface.

    Returns:
        The projected stresses, same shape.

    """
    tensor = np.asarray(tensor, dtype=float)
    dev, dev_norm = _deviator_and_norm(tensor)
    excess = np.maximum(dev_norm - ys.k, 0.0)
    return tensor - excess[..., None] * _direction(dev, dev_norm)


def yosida(tensor, ys, yp):
    # type: (np.ndarray, YieldSurface, YosidaParam) -> np.ndarray
    """Evaluate Y_lambda(T) = (|PT| - k)_+ / (2 lambda) * PT / |PT|.

    Args:
        tensor: Stresses of shape (..., 6).
        ys: The yield surface.
        yp: The regularization parameter.

    Returns:
        The plastic strain rate, traceless, same shape.

    """
    dev, dev_norm = _deviator_and_norm(tensor)
    excess = np.maximum(dev_norm - ys.k, 0.0)
    return (excess / (2.0 * yp.lam))[..., None] * _direction(dev, dev_norm)


def dissipation(tensor, ys, yp):
    # type: (np.ndarray, YieldSurface, YosidaParam) -> np.ndarray
    """Closed form of Y_lambda(T) : T, never negative."""
    _, dev_norm = _deviator_and_norm(tensor)
    return np.maximum(dev_norm - ys.k, 0.0) * dev_norm / (2.0 * yp.lam)


def yosida_energy(tensor, ys, yp):
    # type: (np.ndarray, YieldSurface, YosidaParam) -> np.ndarray
    """M_lambda(T) = (|PT| - k)_+^2 / (4 lambda); its gradient is Y_lambda."""
    _, dev_norm = _deviator_and_norm(tensor)
    return np.maximum(dev_norm - ys.k, 0.0) ** 2 / (4.0 * yp.lam)


def truncate(r, K):
    """T_K(r) = min(K, max(r, -K))."""
    return np.minimum(K, np.maximum(r, -K))


def truncate_derivative(r, K):
    """The a.e. derivative of T_K; zero on the kink set |r| = K."""
    return (np.abs(np.asarray(r, dtype=float)) < K).astype(float)


def phi(r, K):
    """The antiderivative of T_K vanishing at zero."""
    r = np.asarray(r, dtype=float)
    absolute = np.abs(r)
    return np.where(
        absolute <= K,
        0.5 * r * r,
        0.5 * K * K + K * (absolute - K),
    )
