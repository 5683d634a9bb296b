"""Centered scalar latent laws with closed-form raw moments.

Every supported law has mean zero. The estimation method needs a latent law
whose fourth cumulant is nonzero, so the Gaussian law is kept only as a
negative control.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .exceptions import InvalidConfigError, UnsupportedOrderError

MAX_MOMENT_ORDER = 8

# Raw moments of the centered unit-rate exponential: p! * sum_{i<=p} (-1)^i/i!
# (the subfactorial numbers), divided by rate^p for general rate.
_SUBFACTORIAL = (1, 0, 1, 2, 9, 44, 265, 1854, 14833)

# (p-1)!! for even p, appearing in Gaussian raw moments.
_GAUSS_EVEN = {2: 1.0, 4: 3.0, 6: 15.0, 8: 105.0}

EXPONENTIAL = "exponential_centered"
UNIFORM = "uniform_centered"
GAUSSIAN = "gaussian"

_PARAM_KEY = {EXPONENTIAL: "rate", UNIFORM: "half_width", GAUSSIAN: "std"}


@dataclass(frozen=True)
class LatentLaw:
    """A centered scalar distribution identified by kind and one parameter."""

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in _PARAM_KEY:
            raise InvalidConfigError(f"unknown latent law {self.kind!r}")
        if not np.isfinite(self.param) or self.param <= 0:
            raise InvalidConfigError(f"law parameter must be positive, got {self.param}")

    @classmethod
    def exponential(cls, rate=1.0):
        return cls(EXPONENTIAL, float(rate))

    @classmethod
    def uniform(cls, half_width=1.0):
        return cls(UNIFORM, float(half_width))

    @classmethod
    def gaussian(cls, std=1.0):
        return cls(GAUSSIAN, float(std))

    def raw_moment(self, order):
        """E[h^order] in closed form, for order in 1..8."""
        if not 1 <= order <= MAX_MOMENT_ORDER:
            raise UnsupportedOrderError(f"moment order {order} outside 1..{MAX_MOMENT_ORDER}")
        if self.kind == EXPONENTIAL:
            return _SUBFACTORIAL[order] / self.param**order
        if self.kind == UNIFORM:
            if order % 2 == 1:
                return 0.0
            return self.param**order / (order + 1)
        if order % 2 == 1:
            return 0.0
        return _GAUSS_EVEN[order] * self.param**order

    def excess_kurtosis(self):
        """Fourth cumulant m4 - 3*m2^2, written per law to avoid cancellation."""
        if self.kind == EXPONENTIAL:
            return 6.0 / self.param**4
        if self.kind == UNIFORM:
            return -2.0 * self.param**4 / 15.0
        return 0.0

    def from_uniform(self, u):
        """Map uniform(0,1) draws to samples of the law (inverse CDF transform)."""
        u = np.asarray(u, dtype=float)
        if self.kind == EXPONENTIAL:
            return -np.log1p(-u) / self.param - 1.0 / self.param
        if self.kind == UNIFORM:
            return self.param * (2.0 * u - 1.0)
        tiny = np.finfo(float).tiny
        clipped = np.clip(u, tiny, 1.0 - np.finfo(float).epsneg)
        return self.param * ndtri(clipped)

    def to_json(self):
        return {"kind": self.kind, _PARAM_KEY[self.kind]: self.param}

    @classmethod
    def from_json(cls, obj):
        kind = obj.get("kind")
        if kind not in _PARAM_KEY:
            raise InvalidConfigError(f"unknown latent law {kind!r}")
        key = _PARAM_KEY[kind]
        if key not in obj:
            raise InvalidConfigError(f"latent law {kind!r} requires field {key!r}")
        return cls(kind, float(obj[key]))

    @classmethod
    def parse(cls, text):
        """Parse "kind:param" CLI shorthand, e.g. "exponential:1"."""
        parts = text.split(":")
        if len(parts) != 2:
            raise InvalidConfigError(f"expected kind:param, got {text!r}")
        name, raw = parts
        aliases = {
            "exponential": EXPONENTIAL,
            EXPONENTIAL: EXPONENTIAL,
            "uniform": UNIFORM,
            UNIFORM: UNIFORM,
            "gaussian": GAUSSIAN,
        }
        if name not in aliases:
            raise InvalidConfigError(f"unknown latent law {name!r}")
        try:
            param = float(raw)
        except ValueError as exc:
            raise InvalidConfigError(f"bad law parameter {raw!r}") from exc
        return cls(aliases[name], param)
