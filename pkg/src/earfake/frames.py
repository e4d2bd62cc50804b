"""Frame containers and pixel-level preprocessing.

A frame is a row-major grid of intensities, either single-channel
(height, width) or RGB (height, width, 3). Raw frames carry values in
[0, 255]; `normalize_frame` rescales the full buffer into [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "FrameBuffer",
    "min_max_normalize",
    "normalize_frame",
    "resize",
    "to_grayscale",
    "gaussian_blur",
]


@dataclass
class FrameBuffer:
    """Pixel grid with shape (height, width) or (height, width, 3)."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 3 and arr.shape[2] == 1:
            arr = arr[:, :, 0]
        if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
            raise DomainError(f"frame shape {arr.shape} is not HxW or HxWx3")
        if arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DomainError("frame has zero size")
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else self.data.shape[2]

    def copy(self) -> "FrameBuffer":
        return FrameBuffer(self.data.copy())


def min_max_normalize(values) -> tuple[np.ndarray, bool]:
    """Rescale values to [0, 1] by the affine map (v - min)/(max - min).

    Returns (normalized, degenerate). A constant input has no range to
    scale; the output is then all zeros and `degenerate` is True.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise DomainError("cannot normalize an empty array")
    if not np.all(np.isfinite(arr)):
        raise DomainError("cannot normalize non-finite values")
    lo = arr.min()
    span = arr.max() - lo
    if span == 0.0:
        return np.zeros_like(arr), True
    return (arr - lo) / span, False


def normalize_frame(frame: FrameBuffer) -> tuple[FrameBuffer, bool]:
    """Min-max normalize a whole frame buffer into [0, 1]."""
    data, degenerate = min_max_normalize(frame.data)
    return FrameBuffer(data), degenerate


def resize(frame: FrameBuffer, target: tuple[int, int] = (224, 224)) -> FrameBuffer:
    """Bilinear resize to target (height, width).

    Corner-aligned sampling: output corners reproduce input corners
    exactly, and resizing to the same shape is the identity.
    """
    th, tw = int(target[0]), int(target[1])
    if th < 1 or tw < 1:
        raise DomainError(f"invalid resize target {target}")
    src = frame.data
    sh, sw = src.shape[0], src.shape[1]
    if (sh, sw) == (th, tw):
        return frame.copy()

    def axis_coords(n_src: int, n_dst: int) -> np.ndarray:
        if n_dst == 1:
            return np.zeros(1)
        return np.arange(n_dst) * ((n_src - 1) / (n_dst - 1))

    ys = axis_coords(sh, th)
    xs = axis_coords(sw, tw)
    y0 = np.minimum(np.floor(ys).astype(int), sh - 1)
    x0 = np.minimum(np.floor(xs).astype(int), sw - 1)
    y1 = np.minimum(y0 + 1, sh - 1)
    x1 = np.minimum(x0 + 1, sw - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    if src.ndim == 3:
        wy = wy[:, :, None]
        wx = wx[:, :, None]

    top = src[np.ix_(y0, x0)] * (1 - wx) + src[np.ix_(y0, x1)] * wx
    bot = src[np.ix_(y1, x0)] * (1 - wx) + src[np.ix_(y1, x1)] * wx
    return FrameBuffer(top * (1 - wy) + bot * wy)


def to_grayscale(frame: FrameBuffer) -> FrameBuffer:
    """Convert RGB to single-channel luma (0.299 R + 0.587 G + 0.114 B).

    Single-channel input passes through unchanged.
    """
    if frame.channels == 1:
        return frame.copy()
    r, g, b = frame.data[:, :, 0], frame.data[:, :, 1], frame.data[:, :, 2]
    return FrameBuffer(0.299 * r + 0.587 * g + 0.114 * b)


def _gaussian_kernel(sigma: float, radius: int) -> np.ndarray:
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    return kernel / kernel.sum()


def gaussian_blur(frame: FrameBuffer, sigma: float = 1.0, kernel_radius: int = 2) -> FrameBuffer:
    """Separable Gaussian smoothing with mirrored-edge padding.

    The 1-D kernel is normalized to unit sum, so constants are preserved
    and (with the edge-including mirror padding) so is the frame mean.
    """
    if sigma <= 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    kernel_radius = int(kernel_radius)
    if kernel_radius < 1:
        raise DomainError(f"kernel_radius must be >= 1, got {kernel_radius}")

    kernel = _gaussian_kernel(float(sigma), kernel_radius)

    def convolve_axis(arr: np.ndarray, axis: int) -> np.ndarray:
        pad = [(0, 0)] * arr.ndim
        pad[axis] = (kernel_radius, kernel_radius)
        padded = np.pad(arr, pad, mode="symmetric")
        out = np.zeros_like(arr)
        for j, w in enumerate(kernel):
            sl = [slice(None)] * arr.ndim
            sl[axis] = slice(j, j + arr.shape[axis])
            out += w * padded[tuple(sl)]
        return out

    data = convolve_axis(frame.data, 0)
    data = convolve_axis(data, 1)
    return FrameBuffer(data)
