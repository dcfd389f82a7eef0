"""sRGB -> linear RGB -> XYZ -> CIE L*u*v* conversion chain.

The annotation pipeline clusters pixels on the L (luminance) channel of
CIE Luv, so this module is the front door of everything else.  The chain
is fixed:

    nonlinear sRGB channel  --gamma expansion-->  linear r, g, b
    [X Y Z] = [r g b] @ RGB_TO_XYZ               (row-vector convention)
    XYZ -> (L, u, v) relative to a reference white

The reference white is not an external constant: it is the image of
linear white (1, 1, 1) under RGB_TO_XYZ, i.e. the column sums of the
matrix.  That pins white exactly to L = 100, u = v = 0.

All math runs in float64.  Scalar operations delegate to the vectorized
kernels so that converting pixels one at a time and converting a whole
image are bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "RGB_TO_XYZ",
    "CIE_EPSILON",
    "CIE_KAPPA",
    "COMPAT_EPSILON",
    "COMPAT_KAPPA",
    "RgbPixel",
    "LinearRgb",
    "XyzColor",
    "LuvColor",
    "WhitePoint",
    "reference_white",
    "DEFAULT_WHITE",
    "COMPAT_WHITE",
    "linearize_channel",
    "rgb_to_xyz",
    "xyz_to_luv",
    "rgb_to_luv",
    "linearize_array",
    "rgb_array_to_luv",
]

# Linear RGB -> XYZ, row-vector convention: [X Y Z] = [r g b] @ RGB_TO_XYZ.
# Column sums give the tristimulus of linear white.
RGB_TO_XYZ = np.array(
    [
        [0.412424, 0.212656, 0.0193324],
        [0.357579, 0.715158, 0.1191930],
        [0.180464, 0.0721856, 0.950444],
    ],
    dtype=np.float64,
)
RGB_TO_XYZ.setflags(write=False)

# Junction constants for the two branches of L.  The exact fractions make
# 116 * eps**(1/3) - 16 == kappa * eps, so L is continuous.
CIE_EPSILON = 216.0 / 24389.0
CIE_KAPPA = 24389.0 / 27.0

# Rounded constants found in older colorimetry tables.  Kept as an opt-in
# compatibility mode; they leave a small kink at the junction.
COMPAT_EPSILON = 0.0085
COMPAT_KAPPA = 903.3

# sRGB gamma expansion: linear below the threshold, power curve above.
_SRGB_THRESHOLD = 0.04045
_SRGB_LINEAR_DIV = 12.92
_SRGB_OFFSET = 0.055
_SRGB_GAMMA = 2.4


class RgbPixel(NamedTuple):
    """Nonlinear sRGB channels in [0, 1] (8-bit values divided by 255)."""

    R: float
    G: float
    B: float


class LinearRgb(NamedTuple):
    """Linear-light channels in [0, 1]."""

    r: float
    g: float
    b: float


class XyzColor(NamedTuple):
    """CIE tristimulus values, nonnegative."""

    X: float
    Y: float
    Z: float


class LuvColor(NamedTuple):
    """L in [0, 100] for in-gamut input; u, v are chromaticity offsets
    scaled by luminance (0 for achromatic colors)."""

    L: float
    u: float
    v: float


@dataclass(frozen=True)
class WhitePoint:
    """Reference white: tristimulus, derived chromaticities, and the two
    junction constants used by the L branches."""

    X_r: float
    Y_r: float
    Z_r: float
    u_prime_r: float
    v_prime_r: float
    epsilon: float
    kappa: float

    def __post_init__(self):
        if self.Y_r <= 0.0:
            raise ValueError("white point must have Y_r > 0")
        denom = self.X_r + 15.0 * self.Y_r + 3.0 * self.Z_r
        if denom <= 0.0:
            raise ValueError("white point chromaticity denominator must be positive")
        if abs(self.u_prime_r - 4.0 * self.X_r / denom) > 1e-12:
            raise ValueError("u_prime_r inconsistent with tristimulus")
        if abs(self.v_prime_r - 9.0 * self.Y_r / denom) > 1e-12:
            raise ValueError("v_prime_r inconsistent with tristimulus")

    @classmethod
    def from_xyz(cls, X_r, Y_r, Z_r, epsilon=CIE_EPSILON, kappa=CIE_KAPPA):
        denom = X_r + 15.0 * Y_r + 3.0 * Z_r
        return cls(
            X_r=X_r,
            Y_r=Y_r,
            Z_r=Z_r,
            u_prime_r=4.0 * X_r / denom,
            v_prime_r=9.0 * Y_r / denom,
            epsilon=epsilon,
            kappa=kappa,
        )


def _linearize(c):
    return np.where(
        c <= _SRGB_THRESHOLD,
        c / _SRGB_LINEAR_DIV,
        ((c + _SRGB_OFFSET) / (1.0 + _SRGB_OFFSET)) ** _SRGB_GAMMA,
    )


def _xyz_from_linear(r, g, b):
    m = RGB_TO_XYZ
    x = r * m[0, 0] + g * m[1, 0] + b * m[2, 0]
    y = r * m[0, 1] + g * m[1, 1] + b * m[2, 1]
    z = r * m[0, 2] + g * m[1, 2] + b * m[2, 2]
    return x, y, z


def _luv_from_xyz(x, y, z, white):
    y_r = y / white.Y_r
    lum = np.where(
        y_r > white.epsilon,
        116.0 * y_r ** (1.0 / 3.0) - 16.0,
        white.kappa * y_r,
    )
    denom = x + 15.0 * y + 3.0 * z
    # Pure black gives a 0/0 chromaticity; define u', v' as the reference
    # values there so u = v = 0, consistent with the L = 0 limit.
    zero = denom == 0.0
    safe = np.where(zero, 1.0, denom)
    u_prime = np.where(zero, white.u_prime_r, 4.0 * x / safe)
    v_prime = np.where(zero, white.v_prime_r, 9.0 * y / safe)
    u = 13.0 * lum * (u_prime - white.u_prime_r)
    v = 13.0 * lum * (v_prime - white.v_prime_r)
    return lum, u, v


def _check_unit(value, name):
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"channel {name} = {value!r} outside [0, 1]")


def linearize_channel(c: float, name: str = "value") -> float:
    """Expand one nonlinear sRGB channel in [0, 1] to linear light."""
    _check_unit(c, name)
    return float(_linearize(np.float64(c)))


def rgb_to_xyz(p: LinearRgb) -> XyzColor:
    """Map linear RGB to XYZ via the fixed 3x3 matrix."""
    p = LinearRgb(*p)
    for value, name in zip(p, "rgb"):
        _check_unit(value, name)
    x, y, z = _xyz_from_linear(np.float64(p.r), np.float64(p.g), np.float64(p.b))
    return XyzColor(float(x), float(y), float(z))


def xyz_to_luv(c: XyzColor, white: WhitePoint | None = None) -> LuvColor:
    """Convert XYZ to (L, u, v) relative to a reference white."""
    if white is None:
        white = DEFAULT_WHITE
    c = XyzColor(*c)
    for value, name in zip(c, "XYZ"):
        if not (math.isfinite(value) and value >= 0.0):
            raise ValueError(f"tristimulus {name} = {value!r} must be finite and nonnegative")
    lum, u, v = _luv_from_xyz(np.float64(c.X), np.float64(c.Y), np.float64(c.Z), white)
    return LuvColor(float(lum), float(u), float(v))


def rgb_to_luv(p: RgbPixel, white: WhitePoint | None = None) -> LuvColor:
    """Run the full chain for one pixel: gamma expansion, matrix, Luv."""
    p = RgbPixel(*p)
    linear = LinearRgb(
        linearize_channel(p.R, "R"),
        linearize_channel(p.G, "G"),
        linearize_channel(p.B, "B"),
    )
    return xyz_to_luv(rgb_to_xyz(linear), white)


def linearize_array(channels: np.ndarray) -> np.ndarray:
    """Vectorized gamma expansion; any shape, values in [0, 1]."""
    channels = np.asarray(channels, dtype=np.float64)
    if channels.size and (channels.min() < 0.0 or channels.max() > 1.0):
        raise ValueError("channel values outside [0, 1]")
    return _linearize(channels)


def rgb_array_to_luv(pixels: np.ndarray, white: WhitePoint | None = None) -> np.ndarray:
    """Convert an (..., 3) array of nonlinear sRGB values to (..., 3) Luv.

    Bit-identical to running ``rgb_to_luv`` on each pixel.
    """
    if white is None:
        white = DEFAULT_WHITE
    pixels = np.asarray(pixels, dtype=np.float64)
    if pixels.ndim < 1 or pixels.shape[-1] != 3:
        raise ValueError(f"expected an (..., 3) array, got shape {pixels.shape}")
    linear = linearize_array(pixels)
    x, y, z = _xyz_from_linear(linear[..., 0], linear[..., 1], linear[..., 2])
    lum, u, v = _luv_from_xyz(x, y, z, white)
    return np.stack([lum, u, v], axis=-1)


def reference_white(compat_cie: bool = False) -> WhitePoint:
    """White point derived from the matrix (column sums = linear white).

    ``compat_cie`` selects the rounded junction constants instead of the
    exact fractions.
    """
    x, y, z = rgb_to_xyz(LinearRgb(1.0, 1.0, 1.0))
    if compat_cie:
        return WhitePoint.from_xyz(x, y, z, epsilon=COMPAT_EPSILON, kappa=COMPAT_KAPPA)
    return WhitePoint.from_xyz(x, y, z)


DEFAULT_WHITE = reference_white()
COMPAT_WHITE = reference_white(compat_cie=True)
