"""Bundled tables, sample diagrams and their checksum manifest."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .tables import HfkTable, read_hfk

DATA_DIR = Path(__file__).resolve().parent / "data"
MANIFEST_NAME = "manifest.json"
TABLE_NAMES = tuple(f"mm{i}" for i in range(1, 7))


class ManifestError(ValueError):
    """Missing file, unlisted file or checksum mismatch in the data bundle."""


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    kind: str
    sha256: str
    source: str


def sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _kind(rel: str) -> str:
    suffix = Path(rel).suffix
    return {".hfk": "hfk-table", ".pd": "pd-code", ".grd": "grid", ".json": "session"}.get(suffix, "other")


def build_manifest(root: Path = DATA_DIR) -> dict:
    """Recompute the manifest for every data file under ``root``."""
    files = []
    for p in sorted(root.rglob("*")):
        if not p.is_file() or p.name == MANIFEST_NAME or p.name.startswith("."):
            continue
        rel = p.relative_to(root).as_posix()
        source = "published HFK-hat tables, transcribed" if rel in {f"{n}.hfk" for n in TABLE_NAMES} else "hand-made sample"
        files.append({"path": rel, "kind": _kind(rel), "sha256": sha256_file(p), "source": source})
    return {"format": "hfktorsion-manifest/1", "files": files}


def write_manifest(root: Path = DATA_DIR) -> Path:
    out = root / MANIFEST_NAME
    out.write_text(json.dumps(build_manifest(root), indent=2, sort_keys=True) + "\n")
    return out


def load_manifest(root: Path = DATA_DIR) -> list[ManifestEntry]:
    path = root / MANIFEST_NAME
    if not path.is_file():
        raise ManifestError(f"manifest not found at {path}")
    try:
        obj = json.loads(path.read_text())
        return [ManifestEntry(f["path"], f["kind"], f["sha256"], f["source"]) for f in obj["files"]]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ManifestError(f"malformed manifest: {exc}") from None


def check_manifest(root: Path = DATA_DIR) -> list[str]:
    """Every problem with the bundle; an empty list means it is intact."""
    problems = []
    entries = load_manifest(root)
    for e in entries:
        p = root / e.path
        if not p.is_file():
            problems.append(f"{e.path}: missing file")
        elif sha256_file(p) != e.sha256:
            problems.append(f"{e.path}: checksum mismatch")
    listed = {e.path for e in entries}
    for name in TABLE_NAMES:
        if f"{name}.hfk" not in listed:
            problems.append(f"{name}.hfk: not listed in manifest")
    return problems


def data_path(rel: str, root: Path = DATA_DIR) -> Path:
    return root / rel


def bundled_table(name: str, root: Path = DATA_DIR, check: bool = True) -> HfkTable:
    """Read ``mm1`` ... ``mm6``; with ``check`` the file's checksum must match."""
    key = name.lower().removesuffix(".hfk")
    rel = f"{key}.hfk"
    path = root / rel
    if not path.is_file():
        raise ManifestError(f"{rel}: missing file")
    if check:
        entry = {e.path: e for e in load_manifest(root)}.get(rel)
        if entry is None:
            raise ManifestError(f"{rel}: not listed in manifest")
        if sha256_file(path) != entry.sha256:
            raise ManifestError(f"{rel}: checksum mismatch")
    return read_hfk(path.read_text(), name=key.upper())
