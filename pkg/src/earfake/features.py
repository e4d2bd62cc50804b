"""Ear-region descriptors: geometry, appearance (PCA), and the pooled embedding.

The combined descriptor for a frame concatenates three groups, in order:
a pooled-grid intensity embedding of the annotated ear box (passed through
the hyper-sig activation), geometric ear attributes (box size, fitted
ellipse, contour curvature), and PCA appearance coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .activations import hyper_sig
from .errors import DomainError, FitError
from .frames import FrameBuffer

__all__ = [
    "EarRegion",
    "FeatureVector",
    "PcaModel",
    "EllipseFit",
    "ear_size_features",
    "fit_ellipse",
    "curvature_features",
    "pca_fit",
    "pca_project",
    "pca_reconstruct",
    "pooled_ear_embedding",
    "build_feature_vector",
]


@dataclass
class EarRegion:
    """Annotated ear location: bounding box, boundary contour, named landmarks.

    box is (x, y, w, h) in pixels; contour is an ordered (n, 2) array of
    (x, y) boundary points (treated as closed); landmarks maps names to
    (x, y) points.
    """

    box: tuple[int, int, int, int]
    contour: np.ndarray
    landmarks: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        x, y, w, h = self.box
        if w <= 0 or h <= 0:
            raise DomainError(f"ear box must have positive size, got {self.box}")
        self.box = (int(x), int(y), int(w), int(h))
        self.contour = np.asarray(self.contour, dtype=np.float64).reshape(-1, 2)
        if self.contour.shape[0] < 5:
            raise DomainError("contour needs at least 5 points")
        self.landmarks = {
            str(k): np.asarray(v, dtype=np.float64).reshape(2)
            for k, v in self.landmarks.items()
        }


@dataclass
class FeatureVector:
    """The per-frame descriptor [embedding | ear attributes | appearance]."""

    f_ircnn: np.ndarray
    f_ea: np.ndarray
    f_aam: np.ndarray

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.f_ircnn.size, self.f_ea.size, self.f_aam.size)

    def concat(self) -> np.ndarray:
        return np.concatenate([self.f_ircnn, self.f_ea, self.f_aam])

    @classmethod
    def split(cls, flat: np.ndarray, dims: tuple[int, int, int]) -> "FeatureVector":
        flat = np.asarray(flat, dtype=np.float64)
        d1, d2, d3 = dims
        if flat.size != d1 + d2 + d3:
            raise DomainError(f"flat length {flat.size} != dims {dims}")
        return cls(flat[:d1].copy(), flat[d1 : d1 + d2].copy(), flat[d1 + d2 :].copy())


def build_feature_vector(f_ircnn, f_ea, f_aam) -> FeatureVector:
    """Concatenate the three descriptor groups, rejecting non-finite entries."""
    parts = []
    for name, part in (("f_ircnn", f_ircnn), ("f_ea", f_ea), ("f_aam", f_aam)):
        arr = np.asarray(part, dtype=np.float64).ravel()
        if arr.size and not np.all(np.isfinite(arr)):
            raise DomainError(f"{name} contains non-finite entries")
        parts.append(arr)
    return FeatureVector(*parts)


def ear_size_features(region: EarRegion) -> np.ndarray:
    """Box height, width, aspect ratio (h/w), and pairwise landmark distances.

    Landmark distances are emitted in combination order of the sorted
    landmark names so the layout is deterministic.
    """
    _, _, w, h = region.box
    if w == 0:
        raise DomainError("zero-width ear box")
    values = [float(h), float(w), h / w]
    names = sorted(region.landmarks)
    for a, b in combinations(names, 2):
        values.append(float(np.linalg.norm(region.landmarks[a] - region.landmarks[b])))
    return np.array(values)


@dataclass
class EllipseFit:
    center: tuple[float, float]
    semi_axes: tuple[float, float]  # (major, minor), major >= minor > 0
    angle: float  # major-axis orientation, in (-pi/2, pi/2]


def fit_ellipse(points) -> EllipseFit:
    """Direct least-squares ellipse fit (ellipse-specific constraint).

    Solves the constrained conic problem of Halir & Flusser, which always
    returns an ellipse when one exists; fewer than 5 points or degenerate
    (e.g. collinear) data raise FitError.
    """
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 5:
        raise FitError("ellipse fit needs at least 5 points")

    # Center and scale for conditioning; mapped back at the end.
    mean = pts.mean(axis=0)
    scale = np.sqrt(((pts - mean) ** 2).sum(axis=1).mean())
    if scale == 0:
        raise FitError("all points coincide")
    x = (pts[:, 0] - mean[0]) / scale
    y = (pts[:, 1] - mean[1]) / scale

    d1 = np.column_stack([x * x, x * y, y * y])
    d2 = np.column_stack([x, y, np.ones_like(x)])
    s1 = d1.T @ d1
    s2 = d1.T @ d2
    s3 = d2.T @ d2
    try:
        t = -np.linalg.solve(s3, s2.T)
    except np.linalg.LinAlgError as exc:
        raise FitError("degenerate point configuration") from exc
    m = s1 + s2 @ t
    # Premultiply by the inverse of the constraint matrix [[0,0,2],[0,-1,0],[2,0,0]].
    m = np.array([m[2] / 2.0, -m[1], m[0] / 2.0])
    eigval, eigvec = np.linalg.eig(m)
    near_real = np.abs(eigvec.imag).max(axis=0) < 1e-9 if np.iscomplexobj(eigvec) else np.ones(3, bool)
    eigvec = eigvec.real
    cond = 4.0 * eigvec[0] * eigvec[2] - eigvec[1] ** 2
    valid = np.where((cond > 0) & near_real & np.isfinite(eigval.real))[0]
    if valid.size == 0:
        raise FitError("no elliptical solution (collinear or degenerate points)")
    a1 = eigvec[:, valid[0]]
    coeffs = np.concatenate([a1, t @ a1])  # A, B, C, D, E, F in scaled frame

    a, b, c, d, e, f = coeffs
    den = 4 * a * c - b * b
    if den <= 0:
        raise FitError("fitted conic is not an ellipse")
    cx = (b * e - 2 * c * d) / den
    cy = (b * d - 2 * a * e) / den
    mu = a * cx * cx + b * cx * cy + c * cy * cy + d * cx + e * cy + f
    quad = np.array([[a, b / 2.0], [b / 2.0, c]]) / (-mu)
    lam, vec = np.linalg.eigh(quad)
    if np.any(lam <= 0):
        raise FitError("fitted conic is not an ellipse")
    axes = 1.0 / np.sqrt(lam)  # eigh sorts ascending, so axes[0] is the major one
    major, minor = float(axes[0]) * scale, float(axes[1]) * scale
    major_dir = vec[:, 0]
    angle = float(np.arctan2(major_dir[1], major_dir[0]))
    # Fold the direction into (-pi/2, pi/2].
    while angle <= -np.pi / 2:
        angle += np.pi
    while angle > np.pi / 2:
        angle -= np.pi
    center = (float(cx * scale + mean[0]), float(cy * scale + mean[1]))
    return EllipseFit(center, (major, minor), angle)


def curvature_features(contour, k: int = 3) -> tuple[np.ndarray, bool]:
    """Summary [mean, max, variance] of |Menger curvature| along a closed contour.

    Curvature at point i is estimated from the circumscribed circle of the
    triple (i-k, i, i+k) with cyclic indexing. Triples containing repeated
    points are skipped; the returned flag reports whether any were.

    Collinear triples have curvature exactly 0.
    """
    pts = np.asarray(contour, dtype=np.float64).reshape(-1, 2)
    n = pts.shape[0]
    k = int(k)
    if k < 1:
        raise DomainError("neighborhood size k must be >= 1")
    if n < 2 * k + 1:
        raise DomainError(f"contour of {n} points too short for k={k}")

    p0 = pts[(np.arange(n) - k) % n]
    p1 = pts
    p2 = pts[(np.arange(n) + k) % n]
    s01 = np.linalg.norm(p1 - p0, axis=1)
    s12 = np.linalg.norm(p2 - p1, axis=1)
    s02 = np.linalg.norm(p2 - p0, axis=1)
    cross = (p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p1[:, 1] - p0[:, 1]) * (
        p2[:, 0] - p0[:, 0]
    )
    good = (s01 > 0) & (s12 > 0) & (s02 > 0)
    skipped = bool(np.any(~good))
    if not np.any(good):
        raise DomainError("all contour triples are degenerate")
    curvature = np.abs(2.0 * cross[good] / (s01[good] * s12[good] * s02[good]))
    summary = np.array([curvature.mean(), curvature.max(), curvature.var()])
    return summary, skipped


@dataclass
class PcaModel:
    """Mean + orthonormal principal directions (rows) + explained variances."""

    mean: np.ndarray
    components: np.ndarray  # (k, dim)
    explained_variance: np.ndarray  # (k,), descending
    truncated: bool = False

    @property
    def k(self) -> int:
        return self.components.shape[0]


def pca_fit(samples, k: int) -> PcaModel:
    """Fit a k-component PCA by SVD of the mean-centered sample matrix.

    If k exceeds the data rank the model is truncated to the rank and
    flagged via `truncated`.
    """
    data = np.asarray(samples, dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < 2:
        raise DomainError("pca_fit needs a 2-D array with at least 2 samples")
    if k < 1:
        raise DomainError("k must be >= 1")
    n, dim = data.shape
    mean = data.mean(axis=0)
    centered = data - mean
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    tol = s.max(initial=0.0) * max(n, dim) * np.finfo(np.float64).eps
    rank = int(np.sum(s > tol))
    rank = max(rank, 1)
    kept = min(k, rank)
    return PcaModel(
        mean=mean,
        components=vt[:kept].copy(),
        explained_variance=(s[:kept] ** 2) / (n - 1),
        truncated=kept < k,
    )


def pca_project(model: PcaModel, sample) -> np.ndarray:
    """Coefficients of (sample - mean) on the principal directions."""
    arr = np.asarray(sample, dtype=np.float64)
    if arr.shape[-1] != model.mean.shape[0]:
        raise DomainError(
            f"sample dimension {arr.shape[-1]} != model dimension {model.mean.shape[0]}"
        )
    return (arr - model.mean) @ model.components.T


def pca_reconstruct(model: PcaModel, coefficients) -> np.ndarray:
    """Map coefficients back to the data space."""
    return np.asarray(coefficients, dtype=np.float64) @ model.components + model.mean


def pooled_ear_embedding(frame: FrameBuffer, region: EarRegion, grid: int = 6, nonlinearity=hyper_sig) -> np.ndarray:
    """Grid-pooled intensity embedding of the ear box.

    The box is cropped from a normalized single-channel frame, divided
    into a grid x grid array of cells, and each cell's mean intensity is
    passed through the nonlinearity (hyper-sig by default). Output length
    is grid**2.
    """
    if frame.channels != 1:
        raise DomainError("embedding expects a single-channel frame")
    grid = int(grid)
    if grid < 1:
        raise DomainError("grid must be >= 1")
    x, y, w, h = region.box
    if x < 0 or y < 0 or x + w > frame.width or y + h > frame.height:
        raise DomainError(f"ear box {region.box} outside {frame.width}x{frame.height} frame")
    if w < grid or h < grid:
        raise DomainError(f"ear box {w}x{h} smaller than {grid}x{grid} grid")
    crop = frame.data[y : y + h, x : x + w]
    cells = np.empty((grid, grid))
    row_chunks = np.array_split(np.arange(h), grid)
    col_chunks = np.array_split(np.arange(w), grid)
    for i, rows in enumerate(row_chunks):
        for j, cols in enumerate(col_chunks):
            cells[i, j] = crop[np.ix_(rows, cols)].mean()
    return nonlinearity(cells.ravel())
