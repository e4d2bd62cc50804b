"""File formats: frames (PNG/PPM), dataset folders, CSV reports, artifacts.

A dataset folder holds frames/ (one image per frame), annotations.jsonl
(one JSON object per frame: video, frame, box, contour, landmarks), and
manifest.json (labels, frame lists, generator echo). Floats in CSV files
are written with repr so identical runs produce identical bytes.

Artifacts use a small versioned container: the ASCII magic "EARF", a
4-byte little-endian version, an 8-byte payload length, then a JSON
payload.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DomainError
from .features import EarRegion
from .frames import FrameBuffer
from .synthetic import SyntheticDataset, VideoSample

__all__ = [
    "read_frame",
    "write_frame",
    "save_dataset",
    "load_dataset",
    "save_artifact_payload",
    "load_artifact_payload",
    "fmt",
    "write_csv",
    "write_convergence_csv",
    "write_features_csv",
    "write_fusion_csv",
]

ARTIFACT_MAGIC = b"EARF"
ARTIFACT_VERSION = 1
DATASET_VERSION = 1


def fmt(value) -> str:
    """Stable text for CSV cells: repr for floats, str otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def read_frame(path) -> FrameBuffer:
    """Load a PNG or PPM image as a FrameBuffer (grayscale or RGB)."""
    with Image.open(path) as img:
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        data = np.asarray(img, dtype=np.float64)
    return FrameBuffer(data)


def write_frame(path, frame: FrameBuffer) -> None:
    """Write a frame as 8-bit PNG/PPM (values rounded into 0..255)."""
    data = np.clip(np.rint(frame.data), 0, 255).astype(np.uint8)
    mode = "L" if data.ndim == 2 else "RGB"
    Image.fromarray(data, mode=mode).save(path)


def _region_record(video_id: int, frame_idx: int, region: EarRegion) -> dict:
    return {
        "video": video_id,
        "frame": frame_idx,
        "box": list(region.box),
        "contour": region.contour.tolist(),
        "landmarks": {k: v.tolist() for k, v in sorted(region.landmarks.items())},
    }


def save_dataset(dataset: SyntheticDataset, directory) -> None:
    directory = Path(directory)
    frames_dir = directory / "frames"
    frames_dir.mkdir(parents=True, exist_ok=True)

    manifest_videos = []
    annotation_lines = []
    for video in dataset.videos:
        frame_names = []
        for idx, (frame, region) in enumerate(zip(video.frames, video.regions)):
            name = f"video{video.video_id:04d}_frame{idx:03d}.png"
            write_frame(frames_dir / name, frame)
            frame_names.append(name)
            annotation_lines.append(json.dumps(_region_record(video.video_id, idx, region), sort_keys=True))
        manifest_videos.append({"id": video.video_id, "label": video.label, "frames": frame_names})

    (directory / "annotations.jsonl").write_text("\n".join(annotation_lines) + "\n")
    manifest = {
        "format_version": DATASET_VERSION,
        "generator": dataset.generator,
        "videos": manifest_videos,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")


def load_dataset(directory) -> SyntheticDataset:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.exists():
        raise DomainError(f"no manifest.json under {directory}")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format_version") != DATASET_VERSION:
        raise DomainError(f"unsupported dataset version {manifest.get('format_version')}")

    regions: dict[tuple[int, int], EarRegion] = {}
    for line in (directory / "annotations.jsonl").read_text().splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        regions[(rec["video"], rec["frame"])] = EarRegion(
            box=tuple(rec["box"]),
            contour=np.array(rec["contour"], dtype=np.float64),
            landmarks={k: np.array(v, dtype=np.float64) for k, v in rec["landmarks"].items()},
        )

    videos = []
    for entry in manifest["videos"]:
        frames = [read_frame(directory / "frames" / name) for name in entry["frames"]]
        vid_regions = [regions[(entry["id"], idx)] for idx in range(len(frames))]
        videos.append(VideoSample(entry["id"], entry["label"], frames, vid_regions))
    return SyntheticDataset(videos=videos, generator=manifest.get("generator", {}))


def save_artifact_payload(path, payload: dict) -> None:
    body = json.dumps(payload, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(ARTIFACT_MAGIC)
        fh.write(struct.pack("<I", ARTIFACT_VERSION))
        fh.write(struct.pack("<Q", len(body)))
        fh.write(body)


def load_artifact_payload(path) -> dict:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != ARTIFACT_MAGIC:
            raise DomainError(f"{path} is not an artifact file")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != ARTIFACT_VERSION:
            raise DomainError(f"unsupported artifact version {version}")
        (length,) = struct.unpack("<Q", fh.read(8))
        return json.loads(fh.read(length).decode("utf-8"))


def write_convergence_csv(path, trace) -> None:
    write_csv(path, ["iteration", "best_fitness", "mean_fitness"], trace)


def write_features_csv(path, ids, feature_vectors) -> None:
    """One row per frame; header names each column group (ircnn/ea/aam)."""
    if not feature_vectors:
        raise DomainError("no feature vectors to write")
    d1, d2, d3 = feature_vectors[0].dims
    header = ["video", "frame"]
    header += [f"ircnn_{i}" for i in range(d1)]
    header += [f"ea_{i}" for i in range(d2)]
    header += [f"aam_{i}" for i in range(d3)]
    rows = []
    for (video_id, frame_idx), fv in zip(ids, feature_vectors):
        if fv.dims != (d1, d2, d3):
            raise DomainError("inconsistent feature dimensions")
        rows.append([video_id, frame_idx, *fv.concat()])
    write_csv(path, header, rows)


def write_fusion_csv(path, sample_ids, bigru_scores, dbn_scores, result, labels) -> None:
    header = [
        "sample_id",
        "bigru_score",
        "dbn_score",
        "sc_bigru",
        "sc_dbn",
        "fused",
        "decision",
        "label",
    ]
    rows = [
        [sid, rb, rd, sb, sd, fs, int(dec), int(lab)]
        for sid, rb, rd, sb, sd, fs, dec, lab in zip(
            sample_ids,
            bigru_scores,
            dbn_scores,
            result.sc_bigru,
            result.sc_dbn,
            result.fused,
            result.decisions,
            labels,
        )
    ]
    write_csv(path, header, rows)
