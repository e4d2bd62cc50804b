"""Synthetic ear-video generator and the four perturbation test cases.

Each "video" is a short sequence of RGB frames containing one elliptical
ear blob over a textured background, annotated with its bounding box,
boundary contour, and four named landmarks. The real and fake classes
share the generator but draw their ear geometry from offset distributions
(aspect ratio and blob intensity), so they are separable without being
trivial. Frames hold integer values in [0, 255] so a PNG round trip is
lossless.

Perturbations are label-preserving and scale with a per-case severity
whose zero value is always the identity: compression removes intensity
bits, noise adds clipped Gaussian pixel noise, pose_illumination applies
a brightness/contrast shift plus a small shear/translation warp, and
rotation turns the frame (and its annotations) about the frame center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import DomainError
from .features import EarRegion
from .frames import FrameBuffer

__all__ = [
    "GeneratorConfig",
    "VideoSample",
    "SyntheticDataset",
    "TEST_CASES",
    "DEFAULT_SEVERITIES",
    "generate_synthetic",
    "apply_test_case",
    "quantize_frame",
    "add_noise",
    "adjust_illumination",
    "affine_warp",
    "rotate_frame",
]

TEST_CASES = ("compression", "noise", "pose_illumination", "rotation")

DEFAULT_SEVERITIES = {
    "compression": 4.0,  # bits removed from the 8-bit range (4 bits / 16 levels kept)
    "noise": 10.0 / 255.0,  # Gaussian sigma as a fraction of the 255 range
    "pose_illumination": 0.2,  # contrast amplitude; brightness/warp scale with it
    "rotation": 15.0,  # max |angle| in degrees
}

_LANDMARK_NAMES = ("anterior", "superior", "posterior", "inferior")


@dataclass
class GeneratorConfig:
    n_real: int = 50
    n_fake: int = 50
    sequence_length: int = 5
    frame_height: int = 64
    frame_width: int = 64
    real_aspect_mean: float = 1.8
    fake_aspect_mean: float = 1.3
    aspect_std: float = 0.1
    minor_axis_mean: float = 9.0
    minor_axis_std: float = 0.8
    ear_intensity: float = 200.0
    fake_intensity_offset: float = -35.0
    ridge_amplitude: float = 25.0
    ridge_frequency: float = 3.0
    background_base: float = 70.0
    background_noise: float = 8.0
    contour_points: int = 24

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VideoSample:
    video_id: int
    label: int  # 0 real, 1 fake
    frames: list
    regions: list


@dataclass
class SyntheticDataset:
    videos: list
    generator: dict = field(default_factory=dict)

    @property
    def labels(self) -> np.ndarray:
        return np.array([v.label for v in self.videos], dtype=int)

    @property
    def class_counts(self) -> tuple[int, int]:
        labels = self.labels
        return int(np.sum(labels == 0)), int(np.sum(labels == 1))


def _ellipse_points(center, major, minor, angle, ts) -> np.ndarray:
    cos_a, sin_a = math.cos(angle), math.sin(angle)
    ex = major * np.cos(ts)
    ey = minor * np.sin(ts)
    x = center[0] + cos_a * ex - sin_a * ey
    y = center[1] + sin_a * ex + cos_a * ey
    return np.column_stack([x, y])


def _render_frame(config: GeneratorConfig, center, major, minor, angle, intensity, rng) -> FrameBuffer:
    h, w = config.frame_height, config.frame_width
    rows = np.arange(h)[:, None]
    cols = np.arange(w)[None, :]
    gray = (
        config.background_base
        + 20.0 * rows / max(h - 1, 1)
        + 10.0 * cols / max(w - 1, 1)
        + rng.normal(0.0, config.background_noise, size=(h, w))
    )

    cos_a, sin_a = math.cos(angle), math.sin(angle)
    dx = cols - center[0]
    dy = rows - center[1]
    u = (cos_a * dx + sin_a * dy) / major
    v = (-sin_a * dx + cos_a * dy) / minor
    radial = np.sqrt(u * u + v * v)
    inside = radial <= 1.0
    ridge = config.ridge_amplitude * np.cos(2.0 * np.pi * config.ridge_frequency * radial)
    gray = np.where(inside, intensity + ridge, gray)

    gray = np.clip(np.rint(gray), 0, 255)
    rgb = np.stack(
        [np.clip(gray + 6, 0, 255), gray, np.clip(gray - 6, 0, 255)], axis=2
    )
    return FrameBuffer(rgb)


def _region_for(config: GeneratorConfig, center, major, minor, angle) -> EarRegion:
    ts = np.linspace(0.0, 2.0 * np.pi, config.contour_points, endpoint=False)
    contour = _ellipse_points(center, major, minor, angle, ts)
    landmark_ts = np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2])
    lm_pts = _ellipse_points(center, major, minor, angle, landmark_ts)
    landmarks = {name: lm_pts[i] for i, name in enumerate(_LANDMARK_NAMES)}
    h, w = config.frame_height, config.frame_width
    x0 = max(int(np.floor(contour[:, 0].min())) - 2, 0)
    y0 = max(int(np.floor(contour[:, 1].min())) - 2, 0)
    x1 = min(int(np.ceil(contour[:, 0].max())) + 2, w - 1)
    y1 = min(int(np.ceil(contour[:, 1].max())) + 2, h - 1)
    return EarRegion(box=(x0, y0, x1 - x0 + 1, y1 - y0 + 1), contour=contour, landmarks=landmarks)


def generate_synthetic(config: GeneratorConfig, rng) -> SyntheticDataset:
    """Deterministic dataset for a given (config, generator) pair."""
    if config.n_real <= 0 or config.n_fake <= 0:
        raise DomainError("both classes need at least one video")
    if config.sequence_length < 1:
        raise DomainError("sequence_length must be >= 1")
    h, w = config.frame_height, config.frame_width
    if min(h, w) < 32:
        raise DomainError("frames must be at least 32x32")

    videos = []
    video_id = 0
    for label, count in ((0, config.n_real), (1, config.n_fake)):
        aspect_mean = config.real_aspect_mean if label == 0 else config.fake_aspect_mean
        intensity = config.ear_intensity + (config.fake_intensity_offset if label else 0.0)
        for _ in range(count):
            minor = max(float(rng.normal(config.minor_axis_mean, config.minor_axis_std)), 6.0)
            aspect = max(float(rng.normal(aspect_mean, config.aspect_std)), 1.05)
            major = minor * aspect
            base_center = (
                w / 2.0 + float(rng.uniform(-4.0, 4.0)),
                h / 2.0 + float(rng.uniform(-4.0, 4.0)),
            )
            base_angle = float(rng.uniform(-0.35, 0.35))
            frames, regions = [], []
            for _t in range(config.sequence_length):
                center = (
                    base_center[0] + float(rng.uniform(-1.5, 1.5)),
                    base_center[1] + float(rng.uniform(-1.5, 1.5)),
                )
                angle = base_angle + float(rng.uniform(-0.05, 0.05))
                frames.append(_render_frame(config, center, major, minor, angle, intensity, rng))
                regions.append(_region_for(config, center, major, minor, angle))
            videos.append(VideoSample(video_id=video_id, label=label, frames=frames, regions=regions))
            video_id += 1
    return SyntheticDataset(videos=videos, generator=config.to_dict())


# ---------------------------------------------------------------- perturbations


def quantize_frame(frame: FrameBuffer, bits_kept: int) -> FrameBuffer:
    """Uniform quantization of the [0, 255] range to 2**bits_kept levels."""
    bits_kept = int(bits_kept)
    if not 1 <= bits_kept <= 8:
        raise DomainError("bits_kept must be in 1..8")
    levels = 2**bits_kept
    step = 255.0 / (levels - 1)
    return FrameBuffer(np.rint(frame.data / step) * step)


def add_noise(frame: FrameBuffer, sigma: float, rng) -> FrameBuffer:
    """Additive Gaussian pixel noise, clipped back into [0, 255]."""
    if sigma < 0:
        raise DomainError("sigma must be >= 0")
    noisy = frame.data + rng.normal(0.0, sigma, size=frame.data.shape)
    return FrameBuffer(np.clip(noisy, 0.0, 255.0))


def adjust_illumination(frame: FrameBuffer, contrast: float, brightness: float) -> FrameBuffer:
    """Affine intensity map contrast * (v - 128) + 128 + brightness, clipped."""
    out = contrast * (frame.data - 128.0) + 128.0 + brightness
    return FrameBuffer(np.clip(out, 0.0, 255.0))


def _bilinear_sample(data: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample (x, y) positions with bilinear weights and clamp-to-edge."""
    h, w = data.shape[0], data.shape[1]
    xs = np.clip(xs, 0.0, w - 1.0)
    ys = np.clip(ys, 0.0, h - 1.0)
    x0 = np.floor(xs).astype(int)
    y0 = np.floor(ys).astype(int)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    wx = xs - x0
    wy = ys - y0
    if data.ndim == 3:
        wx = wx[..., None]
        wy = wy[..., None]
    top = data[y0, x0] * (1 - wx) + data[y0, x1] * wx
    bot = data[y1, x0] * (1 - wx) + data[y1, x1] * wx
    return top * (1 - wy) + bot * wy


def _warp_region(region: EarRegion, transform, frame_w: int, frame_h: int) -> EarRegion:
    contour = transform(region.contour)
    landmarks = {name: transform(pt[None, :])[0] for name, pt in region.landmarks.items()}
    x0 = max(int(np.floor(contour[:, 0].min())) - 2, 0)
    y0 = max(int(np.floor(contour[:, 1].min())) - 2, 0)
    x1 = min(int(np.ceil(contour[:, 0].max())) + 2, frame_w - 1)
    y1 = min(int(np.ceil(contour[:, 1].max())) + 2, frame_h - 1)
    if x1 <= x0 or y1 <= y0:  # region pushed off-frame; keep a minimal valid box
        x0, y0 = 0, 0
        x1, y1 = frame_w - 1, frame_h - 1
    return EarRegion(box=(x0, y0, x1 - x0 + 1, y1 - y0 + 1), contour=contour, landmarks=landmarks)


def affine_warp(frame: FrameBuffer, region: EarRegion, shear: float, translation) -> tuple[FrameBuffer, EarRegion]:
    """Shear/translate frame and annotations together.

    Points map as x' = x + shear * y + tx, y' = y + ty; pixels are pulled
    through the inverse map with bilinear sampling.
    """
    tx, ty = float(translation[0]), float(translation[1])
    h, w = frame.height, frame.width
    cols, rows = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    src_y = rows - ty
    src_x = cols - shear * src_y - tx
    data = _bilinear_sample(frame.data, src_x, src_y)

    def fwd(pts: np.ndarray) -> np.ndarray:
        out = pts.copy()
        out[:, 0] = pts[:, 0] + shear * pts[:, 1] + tx
        out[:, 1] = pts[:, 1] + ty
        return out

    return FrameBuffer(data), _warp_region(region, fwd, w, h)


def rotate_frame(frame: FrameBuffer, degrees: float, region: EarRegion | None = None):
    """Rotate about the frame center with bilinear resampling.

    With a region supplied, returns (frame, region) with the annotation
    rotated by the same angle (box recomputed from the rotated contour).
    """
    theta = math.radians(degrees)
    if theta == 0.0:  # exact identity, not just within rounding
        return frame.copy() if region is None else (frame.copy(), region)
    h, w = frame.height, frame.width
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    cols, rows = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    dx = cols - cx
    dy = rows - cy
    src_x = cos_t * dx + sin_t * dy + cx
    src_y = -sin_t * dx + cos_t * dy + cy
    data = _bilinear_sample(frame.data, src_x, src_y)
    out = FrameBuffer(data)
    if region is None:
        return out

    def fwd(pts: np.ndarray) -> np.ndarray:
        px = pts[:, 0] - cx
        py = pts[:, 1] - cy
        return np.column_stack([cos_t * px - sin_t * py + cx, sin_t * px + cos_t * py + cy])

    return out, _warp_region(region, fwd, w, h)


def apply_test_case(dataset: SyntheticDataset, case: str, severity: float | None = None, rng=None) -> SyntheticDataset:
    """Perturb every frame of the dataset; labels and counts are preserved."""
    if case not in TEST_CASES:
        raise DomainError(f"unknown test case {case!r}")
    if severity is None:
        severity = DEFAULT_SEVERITIES[case]
    if severity < 0:
        raise DomainError("severity must be >= 0")
    if rng is None:
        rng = np.random.default_rng(0)

    videos = []
    for video in dataset.videos:
        frames, regions = [], []
        for frame, region in zip(video.frames, video.regions):
            if case == "compression":
                bits_kept = int(round(8 - severity))
                if not 1 <= bits_kept <= 8:
                    raise DomainError("compression severity must leave 1..8 bits")
                new_frame = frame.copy() if bits_kept == 8 else quantize_frame(frame, bits_kept)
                new_region = region
            elif case == "noise":
                new_frame = add_noise(frame, severity * 255.0, rng)
                new_region = region
            elif case == "pose_illumination":
                contrast = 1.0 + float(rng.uniform(-severity, severity))
                brightness = float(rng.uniform(-severity, severity)) * 128.0
                shear = float(rng.uniform(-severity, severity)) * 0.25
                translation = (
                    float(rng.uniform(-severity, severity)) * 10.0,
                    float(rng.uniform(-severity, severity)) * 10.0,
                )
                lit = adjust_illumination(frame, contrast, brightness)
                new_frame, new_region = affine_warp(lit, region, shear, translation)
            else:  # rotation
                angle = float(rng.uniform(-severity, severity))
                new_frame, new_region = rotate_frame(frame, angle, region)
            frames.append(new_frame)
            regions.append(new_region)
        videos.append(VideoSample(video.video_id, video.label, frames, regions))
    return SyntheticDataset(videos=videos, generator=dict(dataset.generator))
