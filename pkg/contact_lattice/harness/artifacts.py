# harness/artifacts.py
"""Self-describing output files.

CSV files start with `# key: value` comment lines (spec hash, seed, schema
version, package versions) followed by an ordinary header row. JSON files
carry the same fields under "header" plus a top-level "schema_version".
Every write goes to a temporary file in the target directory and is renamed
into place.
"""
import csv
import io
import json
import logging
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import scipy

ARTIFACT_SCHEMA_VERSION = 1
COMMENT = "# "


def _package_version() -> str:
    from contact_lattice import __version__
    return __version__


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serialisable")


class ArtifactWriter:
    def __init__(self, export_dir: Union[str, Path], spec_hash: str, master_seed: int,
                 experiment: str, prefix: Optional[str] = None):
        self.export_dir = Path(export_dir)
        self.export_dir.mkdir(parents=True, exist_ok=True)
        self.spec_hash = spec_hash
        self.master_seed = int(master_seed)
        self.experiment = experiment
        self.prefix = prefix or experiment
        self.written: List[Path] = []
        self.logger = logging.getLogger(__name__)
        self._lock = threading.Lock()

    def header(self) -> Dict[str, Any]:
        return {
            "schema_version": ARTIFACT_SCHEMA_VERSION,
            "experiment": self.experiment,
            "spec_hash": self.spec_hash,
            "master_seed": self.master_seed,
            "contact_lattice": _package_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        }

    def path_for(self, name: str, ext: str) -> Path:
        return self.export_dir / f"{self.prefix}_{name}.{ext}"

    # === Writers ===
    def write_csv(self, name: str, rows: Sequence[Mapping[str, Any]],
                  fields: Optional[Sequence[str]] = None) -> Path:
        if fields is None:
            fields = list(rows[0].keys()) if rows else []
        buffer = io.StringIO()
        for key, value in self.header().items():
            buffer.write(f"{COMMENT}{key}: {value}\n")
        writer = csv.DictWriter(buffer, fieldnames=list(fields), extrasaction="ignore",
                                lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _csv_cell(v) for k, v in row.items()})
        return self._commit(self.path_for(name, "csv"), buffer.getvalue())

    def write_json(self, name: str, payload: Mapping[str, Any]) -> Path:
        document = {"schema_version": ARTIFACT_SCHEMA_VERSION, "header": self.header()}
        document.update({k: v for k, v in payload.items() if k not in document})
        text = json.dumps(document, indent=2, sort_keys=True, default=_plain) + "\n"
        return self._commit(self.path_for(name, "json"), text)

    def _commit(self, path: Path, content: str) -> Path:
        with self._lock:
            fd, tmp = tempfile.mkstemp(dir=self.export_dir, prefix=f".{path.name}.", suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                    f.write(content)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
            self.written.append(path)
        self.logger.info("Wrote %s", path)
        return path


def _csv_cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, np.generic):
        return _csv_cell(value.item())
    if isinstance(value, (list, tuple)):
        return ";".join(str(_csv_cell(v)) for v in value)
    return value


# === Readers ===
def read_csv_header(path: Union[str, Path]) -> Dict[str, str]:
    header = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            if not line.startswith(COMMENT):
                break
            key, _, value = line[len(COMMENT):].rstrip("\n").partition(": ")
            header[key] = value
    return header


def read_csv(path: Union[str, Path]) -> Tuple[Dict[str, str], List[Dict[str, str]]]:
    with open(path, "r", encoding="utf-8") as f:
        lines = f.read().splitlines()
    body = [line for line in lines if not line.startswith(COMMENT)]
    return read_csv_header(path), list(csv.DictReader(body))


def read_json(path: Union[str, Path]) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)
