"""JSON-lines corpus manifests.

One entry per line, ``{"path", "role", "pair_id", "split"}``. Paths are relative to the
directory holding the manifest.
"""

from __future__ import annotations

import enum
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any

from ..exceptions import ManifestFormatError, ManifestNotFoundError, PairingError
from ..imagecore import png_size

if TYPE_CHECKING:
    from collections.abc import Iterable

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.jsonl"
ENTRY_KEYS = frozenset({"path", "role", "pair_id", "split"})


class Role(str, enum.Enum):
    REAL_DEGRADED = "real_degraded"
    NON_DEGRADED = "non_degraded"
    PAIRED_DEGRADED = "paired_degraded"
    PAIRED_RESTORED = "paired_restored"

    def __str__(self) -> str:
        return self.value

    @property
    def paired(self) -> bool:
        return self in {Role.PAIRED_DEGRADED, Role.PAIRED_RESTORED}


class Split(str, enum.Enum):
    TRAIN = "train"
    HELDOUT = "heldout"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    role: Role
    split: Split = Split.TRAIN
    pair_id: str | None = None

    def to_json(self) -> dict[str, Any]:
        return {"path": self.path, "role": str(self.role), "pair_id": self.pair_id, "split": str(self.split)}


@dataclass(frozen=True)
class CorpusManifest:
    """Validated manifest entries plus the directory their paths are relative to."""

    root: Path
    entries: tuple[ManifestEntry, ...]

    def resolve(self, entry: ManifestEntry) -> Path:
        return self.root / entry.path

    def select(self, role: Role, split: Split | None = None) -> list[ManifestEntry]:
        return [e for e in self.entries if e.role is role and (split is None or e.split is split)]

    def pairs(self, split: Split | None = None) -> list[tuple[ManifestEntry, ManifestEntry]]:
        """(paired_degraded, paired_restored) entries sorted by pair id."""
        groups: dict[str, dict[Role, ManifestEntry]] = defaultdict(dict)
        for entry in self.entries:
            if entry.role.paired and (split is None or entry.split is split):
                groups[entry.pair_id][entry.role] = entry  # type: ignore[index]
        return [
            (group[Role.PAIRED_DEGRADED], group[Role.PAIRED_RESTORED]) for _, group in sorted(groups.items())
        ]

    def validate(self) -> None:
        """Check pair closure and pair dimensions.

        Raises:
            PairingError: if a pair id does not name exactly one degraded and one restored
                entry of the same split, or the two images differ in size.
        """
        groups: dict[str, list[ManifestEntry]] = defaultdict(list)
        for entry in self.entries:
            if entry.role.paired:
                groups[entry.pair_id].append(entry)  # type: ignore[index]
        for pair_id, members in sorted(groups.items()):
            roles = sorted(str(e.role) for e in members)
            if roles != [str(Role.PAIRED_DEGRADED), str(Role.PAIRED_RESTORED)]:
                msg = f"Pair '{pair_id}' has roles {roles}, expected one paired_degraded and one paired_restored"
                raise PairingError(msg)
            if members[0].split is not members[1].split:
                msg = f"Pair '{pair_id}' is split across {members[0].split} and {members[1].split}"
                raise PairingError(msg)
            sizes = {png_size(self.resolve(e)) for e in members}
            if len(sizes) > 1:
                msg = f"Pair '{pair_id}' has mismatched dimensions {sorted(sizes)}"
                raise PairingError(msg)

    def save(self, path: str | Path | None = None) -> Path:
        path = Path(path) if path is not None else self.root / MANIFEST_NAME
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = (json.dumps(entry.to_json(), sort_keys=True) for entry in self.entries)
        path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
        return path

    @classmethod
    def from_entries(cls, root: str | Path, entries: Iterable[ManifestEntry]) -> CorpusManifest:
        return cls(Path(root), tuple(entries))


def _parse_entry(line: int, text: str, root: Path) -> ManifestEntry:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as err:
        raise ManifestFormatError(line, f"invalid JSON ({err.msg})") from err
    if not isinstance(record, dict):
        raise ManifestFormatError(line, f"expected a JSON object, got {type(record).__name__}")
    unknown = sorted(set(record) - ENTRY_KEYS)
    if unknown:
        raise ManifestFormatError(line, f"unknown key(s) {unknown}")
    for key in ("path", "role", "split"):
        if not isinstance(record.get(key), str):
            raise ManifestFormatError(line, f"missing or non-string '{key}'")
    try:
        role = Role(record["role"])
    except ValueError:
        raise ManifestFormatError(line, f"unknown role '{record['role']}'") from None
    try:
        split = Split(record["split"])
    except ValueError:
        raise ManifestFormatError(line, f"unknown split '{record['split']}'") from None
    pair_id = record.get("pair_id")
    if role.paired and not isinstance(pair_id, str):
        raise ManifestFormatError(line, f"role '{role}' requires a pair_id")
    if not role.paired and pair_id is not None:
        raise ManifestFormatError(line, f"role '{role}' must not carry a pair_id")
    if not (root / record["path"]).is_file():
        raise ManifestFormatError(line, f"image file not found: {root / record['path']}")
    return ManifestEntry(record["path"], role, split, pair_id)


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read and validate a JSON-lines manifest.

    Raises:
        ManifestNotFoundError: if ``path`` does not exist.
        ManifestFormatError: for a malformed entry or a missing image, naming the line.
        PairingError: for an incomplete pair or a pair of mismatched dimensions.
    """
    path = Path(path)
    if not path.is_file():
        msg = f"Manifest not found: {path}"
        raise ManifestNotFoundError(msg)
    root = path.parent
    entries = [
        _parse_entry(number, text, root)
        for number, text in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1)
        if text.strip()
    ]
    manifest = CorpusManifest(root, tuple(entries))
    manifest.validate()
    logger.info("Loaded manifest %s with %d entries", path, len(entries))
    return manifest
