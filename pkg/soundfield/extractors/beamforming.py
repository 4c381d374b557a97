"""
Signal-independent first-order beamformers with projection back to FOA.

Weights are [g0, g1 * (u_y, u_z, u_x)] for steer unit vector u, normalized so the
response towards the steer direction is exactly g0 + g1 = 1.
"""

import math

import numpy as np

from ..ambisonics.encoding import FoaSignal, sh_eval, sh_matrix_from_vectors
from ..exceptions import ConfigurationError

_SQRT3 = math.sqrt(3.0)

# kind -> (g0, g1); max-DI has pattern (1 + 3 cos) / 4, max-rE has g1 / g0 = sqrt(3)
ORDER_WEIGHTS = {
    'max_di': (0.25, 0.75),
    'max_re': (1.0 / (1.0 + _SQRT3), _SQRT3 / (1.0 + _SQRT3)),
}


def _order_weights(kind):
    try:
        return ORDER_WEIGHTS[kind]
    except KeyError:
        raise ConfigurationError(f"Unknown beam kind '{kind}', expected one of {sorted(ORDER_WEIGHTS)}") from None


def beam_weights(kind, steer):
    g0, g1 = _order_weights(kind)
    gains = sh_eval(steer).coefficients
    return np.concatenate([[g0], g1 * gains[1:]])


def null_angle(kind):
    """Off-steer angle in radians where the beam response crosses zero."""
    g0, g1 = _order_weights(kind)
    return math.acos(-g0 / g1)


def beam_pattern(kind, steer, vectors):
    """Beam response to unit plane waves arriving from each row of `vectors`."""
    return sh_matrix_from_vectors(vectors) @ beam_weights(kind, steer)


def beamform(x, weights):
    return weights @ x.samples


def beamform_and_project(x, kind, target_dir):
    weights = beam_weights(kind, target_dir)
    estimate = beamform(x, weights)
    return FoaSignal(np.outer(sh_eval(target_dir).coefficients, estimate), x.sample_rate)
