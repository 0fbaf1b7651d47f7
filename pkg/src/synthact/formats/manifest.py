"""Dataset manifest: generated clip index plus per-method stream weights."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, ValidationError

METHODS = ("BG+R", "BG+R2T", "3D+R", "3D+M", "R3D+R")
EXTERNAL_REAL = "external-real"

# (rgb weight, flow weight) per video subset; external-real covers clips
# that did not come out of the generator.
DEFAULT_WEIGHTS: dict[str, tuple[float, float]] = {
    "BG+R": (1.0, 0.0),
    "BG+R2T": (0.0, 1.0),
    "3D+R": (1.0, 1.0),
    "3D+M": (1.0, 1.0),
    "R3D+R": (1.0, 1.0),
    EXTERNAL_REAL: (8.0, 3.0),
}


@dataclass
class ManifestEntry:
    path: str
    label: str
    method: str
    subject_id: str
    seed: int
    flow_path: str | None = None
    error: str | None = None

    def to_json(self) -> dict:
        doc = {
            "path": self.path,
            "label": self.label,
            "method": self.method,
            "subject_id": self.subject_id,
            "seed": self.seed,
        }
        if self.flow_path is not None:
            doc["flow_path"] = self.flow_path
        if self.error is not None:
            doc["error"] = self.error
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "ManifestEntry":
        return cls(
            path=doc["path"],
            label=doc["label"],
            method=doc["method"],
            subject_id=doc["subject_id"],
            seed=int(doc["seed"]),
            flow_path=doc.get("flow_path"),
            error=doc.get("error"),
        )


@dataclass
class Manifest:
    entries: list[ManifestEntry] = field(default_factory=list)
    weights: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_WEIGHTS)
    )

    def validate(self) -> "Manifest":
        paths = [e.path for e in self.entries]
        if len(set(paths)) != len(paths):
            raise ValidationError("manifest contains duplicate clip paths")
        for method, (rgb, flow) in self.weights.items():
            if rgb < 0 or flow < 0:
                raise ValidationError(f"negative weight for {method!r}")
        return self

    def set_weight(self, method: str, rgb: float, flow: float) -> None:
        if rgb < 0 or flow < 0:
            raise ValidationError(f"weights must be nonnegative, got ({rgb}, {flow})")
        self.weights[method] = (float(rgb), float(flow))

    def counts(self) -> dict:
        by_label: dict[str, int] = {}
        by_method: dict[str, int] = {}
        for e in self.entries:
            if e.error is not None:
                continue
            by_label[e.label] = by_label.get(e.label, 0) + 1
            by_method[e.method] = by_method.get(e.method, 0) + 1
        return {"by_label": by_label, "by_method": by_method,
                "total": sum(by_label.values()),
                "errors": sum(1 for e in self.entries if e.error is not None)}

    def to_json(self) -> dict:
        return {
            "entries": [e.to_json() for e in self.entries],
            "weights": {m: [rgb, flow] for m, (rgb, flow) in sorted(self.weights.items())},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Manifest":
        try:
            entries = [ManifestEntry.from_json(e) for e in doc["entries"]]
            weights = {m: (float(w[0]), float(w[1])) for m, w in doc["weights"].items()}
        except (KeyError, TypeError, IndexError) as e:
            raise ParseError(f"manifest JSON missing or malformed field: {e}") from e
        return cls(entries=entries, weights=weights).validate()


def save_manifest(manifest: Manifest, path) -> None:
    """Atomic write: serialize to a sibling temp file, then rename."""
    manifest.validate()
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(manifest.to_json(), indent=1, sort_keys=True))
    os.replace(tmp, path)


def load_manifest(path) -> Manifest:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ParseError(f"manifest is not valid JSON: {e}") from e
    return Manifest.from_json(doc)
