"""Atomic, deterministic file output for experiment artifacts."""
import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def config_digest(payload: Dict[str, Any]) -> str:
    """
    Stable short digest of a JSON-able payload.

    Keys are sorted before hashing so logically equal configs produce the
    same digest regardless of construction order.
    """
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.md5(canonical.encode()).hexdigest()[:12]


def experiment_dir(out_dir: PathLike, profile: str, breakpoint_count: int, seed: int) -> Path:
    """Directory for one sweep point: <out_dir>/<profile>/B<b>/seed<s>."""
    return Path(out_dir) / profile / f"B{breakpoint_count}" / f"seed{seed}"


class ArtifactStore:
    """
    Writes artifacts under a root directory.

    Every write goes to a temp file in the destination directory followed by
    os.replace, so readers never observe a half-written file. Artifacts carry
    no timestamps; identical inputs give byte-identical files.
    """

    def __init__(self, root: PathLike):
        self.root = Path(root)

    def path(self, relative: PathLike) -> Path:
        return self.root / relative

    def _write_atomic(self, relative: PathLike, text: str) -> Path:
        target = self.path(relative)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.debug(f"Wrote {target}")
        return target

    def write_json(self, relative: PathLike, payload: Any) -> Path:
        """JSON with two-space indent and a trailing newline; key order is preserved."""
        return self._write_atomic(relative, json.dumps(payload, indent=2) + "\n")

    def write_csv(self, relative: PathLike, frame: pd.DataFrame) -> Path:
        return self._write_atomic(relative, frame.to_csv(index=False, lineterminator="\n"))
