"""Symmetric-tensor algebra in three dimensions.

Symmetric 3x3 tensors are stored as arrays whose last axis holds
the six independent components in the order

    xx, yy, zz, xy, xz, yz

so a single tensor has shape (6,) and a field of tensors at n
quadrature points has shape (n, 6).  Off-diagonal components are
the tensor entries themselves (not engineering shears), which is
why `inner` counts them twice.

"""
from dataclasses import dataclass
from typing import (  # noqa: F401
    Optional,
)

import numpy as np

from .errors import InvalidValueError


COMPONENTS = ('xx', 'yy', 'zz', 'xy', 'xz', 'yz')

# Multiplicity of each stored component in a full contraction.
METRIC = np.array([1.0, 1.0, 1.0, 2.0, 2.0, 2.0])

IDENTITY = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])

# The (row, column) index of each stored component.
_MATRIX_INDEX = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))


def sym_tensor(xx=0.0, yy=0.0, zz=0.0, xy=0.0, xz=0.0, yz=0.0):
    # type: (float, float, float, float, float, float) -> np.ndarray
    """Build a single symmetric tensor from its components.

    Args:
        xx: The xx component.
        yy: The yy component.
        zz: The zz component.
        xy: The xy (= yx) component.
        xz: The xz (= zx) component.
        yz: The yz (= zy) component.

    Returns:
        An array of shape (6,).

    """
    return np.array([xx, yy, zz, xy, xz, yz], dtype=float)


def from_matrix(matrix):
    # type: (np.ndarray) -> np.ndarray
    """Take the symmetric part of 3x3 matrices as stored tensors.

    Args:
        matrix: An array of shape (..., 3, 3).

    Returns:
        An array of shape (..., 6).

    """
    matrix = np.asarray(matrix, dtype=float)
    sym = 0.5 * (matrix + np.swapaxes(matrix, -1, -2))
    return np.stack([sym[..., i, j] for i, j in _MATRIX_INDEX], axis=-1)


def to_matrix(tensor):
    # type: (np.ndarray) -> np.ndarray
    tensor = np.asarray(tensor, dtype=float)
    matrix = np.zeros(tensor.shape[:-1] + (3, 3))
    for component, (i, j) in enumerate(_MATRIX_INDEX):
        matrix[..., i, j] = tensor[..., component]
        matrix[..., j, i] = tensor[..., component]
    return matrix


def trace(tensor):
    # type: (np.ndarray) -> np.ndarray
    tensor = np.asarray(tensor, dtype=float)
    return tensor[..., 0] + tensor[..., 1] + tensor[..., 2]


def deviator(tensor):
    # type: (np.ndarray) -> np.ndarray
    """Project onto the deviatoric (traceless) part.

    Args:
        tensor: An array of shape (..., 6).

    Returns:
        T - (tr T / 3) Id, with the same shape.

    """
    tensor = np.asarray(tensor, dtype=float)
    return tensor - (trace(tensor) / 3.0)[..., None] * IDENTITY


def inner(a, b):
    # type: (np.ndarray, np.ndarray) -> np.ndarray
    """Contract two symmetric tensors, A : B.

    Args:
        a: An array of shape (..., 6).
        b: An array of shape (..., 6).

    Returns:
        The sum of A_ij B_ij over all nine entries.

    """
    return np.sum(METRIC * np.asarray(a, dtype=float) * b, axis=-1)


def norm(tensor):
    # type: (np.ndarray) -> np.ndarray
    return np.sqrt(inner(tensor, tensor))


@dataclass(frozen=True)
class ElasticityTensor(object):
    """The isotropic elasticity operator D.

    D e = 2 * lame_second * e + lame_first * tr(e) * Id

    """

    lame_first: float
    lame_second: float

    def __post_init__(self):
        if not self.lame_second > 0:
            raise InvalidValueError(
                'material.lame_second', self.lame_second, 'a value > 0',
            )
        if not self.lame_first > -2.0 * self.lame_second / 3.0:
            raise InvalidValueError(
                'material.lame_first',
                self.lame_first,
                'a value > -2/3 * lame_second',
            )

    @property
    def bulk_modulus(self):
        # type: () -> float
        return self.lame_first + 2.0 * self.lame_second / 3.0

    @property
    def coercivity(self):
        # type: () -> float
        """The constant c0 with D e : e >= c0 |e|^2."""
        return min(
            2.0 * self.lame_second,
            2.0 * self.lame_second + 3.0 * self.lame_first,
        )

    def matrix(self):
        # type: () -> np.ndarray
        """The 6x6 matrix acting on stored components.

        Returns:
            M such that apply_D(D, e) == M @ e.

        """
        return (
            2.0 * self.lame_second * np.eye(6)
            + self.lame_first * np.outer(IDENTITY, IDENTITY)
        )


def apply_D(D, e):
    # type: (ElasticityTensor, np.ndarray) -> np.ndarray
    e = np.asarray(e, dtype=float)
    return (
        2.0 * D.lame_second * e
        + D.lame_first * trace(e)[..., None] * IDENTITY
    )


def apply_D_inv(D, s):
    # type: (ElasticityTensor, np.ndarray) -> np.ndarray
    """Invert the isotropic elasticity operator in closed form.

    Args:
        D: The elasticity tensor.
        s: Stresses, an array of shape (..., 6).

    Returns:
        The strains e with apply_D(D, e) == s.

    """
    s = np.asarray(s, dtype=float)
    mu2 = 2.0 * D.lame_second
    volumetric = D.lame_first / (mu2 * (mu2 + 3.0 * D.lame_first))
    return s / mu2 - volumetric * trace(s)[..., None] * IDENTITY
