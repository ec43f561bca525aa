"""Directory-backed store of named artifacts with a manifest.

Artifacts are stored in their canonical text serialization, so a get after
a put returns byte-identical content for canonical input.  The manifest
records every artifact's kind and file, plus the tuple enumeration in force
for structure-distance computations.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from . import textio
from .syntax import parse, print_formula


class CatalogError(ValueError):
    pass


def _canon_formula(text: str) -> str:
    return print_formula(parse(text, loose=True)) + "\n"


def _canon_enumeration(text: str) -> str:
    lines = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "t" or len(parts) < 3:
            raise CatalogError(f"bad enumeration line: {line!r}")
        lines.append(" ".join(parts))
    if not lines:
        raise CatalogError("empty enumeration")
    return "\n".join(lines) + "\n"


def parse_enumeration(text: str) -> List[Tuple[str, Tuple[str, ...]]]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        parts = line.split()
        out.append((parts[1], tuple(parts[2:])))
    return out


CANONICALIZERS: Dict[str, Callable[[str], str]] = {
    "space": lambda t: textio.serialize_space(textio.parse_space(t)),
    "structure": lambda t: textio.serialize_structure(textio.parse_structure(t)),
    "formula": _canon_formula,
    "isometry": lambda t: "\n".join(
        f"map {p} {q}" for p, q in sorted(textio.parse_isometry_lines(t).items())) + "\n",
    "descriptor": lambda t: textio.serialize_descriptor(textio.parse_descriptor(t)),
    "gspace": lambda t: textio.serialize_gspace(*textio.parse_gspace(t)),
    "instance": lambda t: textio.serialize_instance(textio.parse_instance(t)),
    "enumeration": _canon_enumeration,
}

EXTENSIONS = {"space": "space", "structure": "struct", "formula": "formula",
              "isometry": "isom", "descriptor": "graded", "gspace": "gspace",
              "instance": "inst", "enumeration": "enum"}


class Catalog:
    def __init__(self, directory: str | Path):
        self.dir = Path(directory)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.dir / "manifest.json"
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())
        else:
            self.manifest = {"artifacts": {}, "delta_enumeration": None}

    def _save(self):
        self.manifest_path.write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n")

    def put(self, name: str, kind: str, text: str) -> dict:
        if kind not in CANONICALIZERS:
            raise CatalogError(f"unknown artifact kind {kind!r}")
        if name in self.manifest["artifacts"]:
            raise CatalogError(f"name collision: {name!r} already stored")
        try:
            canonical = CANONICALIZERS[kind](text)
        except Exception as exc:
            raise CatalogError(f"{kind} does not parse: {exc}") from None
        filename = f"{name}.{EXTENSIONS[kind]}"
        (self.dir / filename).write_text(canonical)
        entry = {"kind": kind, "file": filename}
        self.manifest["artifacts"][name] = entry
        self._save()
        return entry

    def get(self, name: str) -> Tuple[str, str]:
        """Returns (kind, canonical text)."""
        entry = self.manifest["artifacts"].get(name)
        if entry is None:
            raise CatalogError(f"not found: {name!r}")
        return entry["kind"], (self.dir / entry["file"]).read_text()

    def set_delta_enumeration(self, name: Optional[str]):
        if name is not None:
            kind, _ = self.get(name)
            if kind != "enumeration":
                raise CatalogError(f"{name!r} is not an enumeration artifact")
        self.manifest["delta_enumeration"] = name
        self._save()

    def names(self) -> List[str]:
        return sorted(self.manifest["artifacts"])
