"""Folder-labeled corpus ingestion with color/depth pairing."""

from __future__ import annotations

import csv
import fnmatch
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..errors import ConfigError, EmptyCorpus, PairingError

DEFAULT_PATTERNS = {"color": "*_color.png", "depth": "*_depth.pgm"}


@dataclass(frozen=True)
class Sample:
    key: str
    label: int
    class_name: str
    paths: dict  # modality -> file path (str)
    crop: tuple | None = None  # (x, y, w, h)


@dataclass
class CorpusIndex:
    samples: list[Sample]
    class_names: list[str]
    modalities: list[str] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    @property
    def labels(self) -> list[int]:
        return [s.label for s in self.samples]

    def to_json(self) -> str:
        return json.dumps({"class_names": self.class_names, "modalities": self.modalities,
                           "samples": [asdict(s) for s in self.samples]}, indent=1)

    @classmethod
    def from_json(cls, text) -> "CorpusIndex":
        d = json.loads(text)
        samples = [Sample(s["key"], s["label"], s["class_name"], s["paths"],
                          tuple(s["crop"]) if s.get("crop") else None) for s in d["samples"]]
        return cls(samples, d["class_names"], d["modalities"])


def _split_pattern(pattern: str):
    if pattern.count("*") != 1:
        raise ConfigError(f"pattern {pattern!r} must contain exactly one '*'")
    pre, post = pattern.split("*")
    return pre, post


def _key(name: str, pattern: str) -> str:
    pre, post = _split_pattern(pattern)
    return name[len(pre):len(name) - len(post)] if post else name[len(pre):]


def read_crop_boxes(path) -> dict:
    """Sidecar CSV with header key,x,y,w,h."""
    boxes = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            try:
                boxes[row["key"]] = tuple(int(row[c]) for c in ("x", "y", "w", "h"))
            except (KeyError, ValueError) as exc:
                raise ConfigError(f"bad crop-box row {row!r}") from exc
    return boxes


def ingest(directory, patterns=None, crop_boxes=None) -> CorpusIndex:
    """Index <dir>/<class>/<files>; labels follow sorted class-folder names.

    The first pattern is the primary modality.  With several patterns,
    files are paired by the text the '*' matched; any unpaired file
    raises PairingError naming the stems.
    """
    root = Path(directory)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    patterns = dict(patterns or DEFAULT_PATTERNS)
    if not patterns:
        raise ConfigError("at least one modality pattern is required")
    for p in patterns.values():
        _split_pattern(p)
    boxes = read_crop_boxes(crop_boxes) if isinstance(crop_boxes, (str, Path)) else (crop_boxes or {})
    modalities = list(patterns)
    found = []  # (class name, {key: {modality: path}})
    for cdir in sorted(p for p in root.iterdir() if p.is_dir()):
        files = sorted(f.name for f in cdir.iterdir() if f.is_file())
        per_mod = {m: {_key(f, pat): str(cdir / f) for f in files if fnmatch.fnmatchcase(f, pat)}
                   for m, pat in patterns.items()}
        all_keys = set().union(*(set(v) for v in per_mod.values()))
        if not all_keys:
            continue
        unpaired = sorted(k for k in all_keys if any(k not in per_mod[m] for m in modalities))
        if unpaired:
            missing = [f"{cdir.name}/{k}" for k in unpaired]
            raise PairingError(f"unpaired modality files for stems: {', '.join(missing)}", missing)
        found.append((cdir.name, {k: {m: per_mod[m][k] for m in modalities} for k in all_keys}))
    if not found:
        raise EmptyCorpus(f"no files matching {list(patterns.values())} under {root}")
    samples = []
    for label, (cname, entries) in enumerate(found, start=1):
        for key in sorted(entries):
            samples.append(Sample(key, label, cname, entries[key], boxes.get(key)))
    return CorpusIndex(samples, [c for c, _ in found], modalities)
