"""Scalar activation functions used by the detection models.

The hyper-sig activation is the sum of the bipolar sigmoid and the
hyperbolic tangent; its rational closed form is algebraically identical
but overflows for |x| above ~700, so everything here is evaluated through
sign-stable exponentials. All functions accept scalars or numpy arrays
and return matching shapes (Python floats for scalar input).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .errors import DomainError

__all__ = [
    "ActivationKind",
    "bipolar_sigmoid",
    "hyperbolic_activation",
    "hyper_sig",
    "hyper_sig_derivative",
    "logistic_sigmoid",
]


def _checked(x):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("activation input must be finite")
    return arr


def _as_input_shape(value: np.ndarray, x):
    if np.isscalar(x) or np.ndim(x) == 0:
        return float(value)
    return value


def logistic_sigmoid(x):
    """1 / (1 + e^-x), evaluated without overflow for any finite x."""
    arr = _checked(x)
    z = np.exp(-np.abs(arr))
    out = np.where(arr >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
    return _as_input_shape(out, x)


def bipolar_sigmoid(x):
    """-1 + 2/(1 + e^-x); strictly increasing with range (-1, 1)."""
    arr = _checked(x)
    # 2*sigma(x) - 1 == tanh(x/2): same value, total on all finite inputs.
    return _as_input_shape(np.tanh(arr / 2.0), x)


def hyperbolic_activation(x):
    """(e^x - e^-x)/(e^x + e^-x), i.e. the hyperbolic tangent."""
    arr = _checked(x)
    return _as_input_shape(np.tanh(arr), x)


def hyper_sig(x):
    """Bipolar sigmoid plus hyperbolic tangent; odd, increasing, range (-2, 2).

    Equal to the rational form (2e^x - 2e^-2x)/(e^x + e^-x + e^-2x + 1)
    wherever that form does not overflow.
    """
    arr = _checked(x)
    return _as_input_shape(np.tanh(arr / 2.0) + np.tanh(arr), x)


def hyper_sig_derivative(x):
    """First derivative of hyper_sig; strictly positive, peaks at 1.5 at x=0."""
    arr = _checked(x)
    half = np.tanh(arr / 2.0)
    full = np.tanh(arr)
    out = 0.5 * (1.0 - half * half) + (1.0 - full * full)
    return _as_input_shape(out, x)


class ActivationKind(Enum):
    """Tags for the activations the scoring models can be configured with."""

    BIPOLAR_SIGMOID = "bipolar_sigmoid"
    HYPERBOLIC_ACTIVATION = "hyperbolic_activation"
    HYPER_SIG = "hyper_sig"
    LOGISTIC_SIGMOID = "logistic_sigmoid"

    @property
    def function(self):
        return _FUNCTIONS[self]

    def __call__(self, x):
        return _FUNCTIONS[self](x)


_FUNCTIONS = {
    ActivationKind.BIPOLAR_SIGMOID: bipolar_sigmoid,
    ActivationKind.HYPERBOLIC_ACTIVATION: hyperbolic_activation,
    ActivationKind.HYPER_SIG: hyper_sig,
    ActivationKind.LOGISTIC_SIGMOID: logistic_sigmoid,
}
