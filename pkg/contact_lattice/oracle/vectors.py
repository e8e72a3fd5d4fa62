# oracle/vectors.py

import json
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from contact_lattice.core.lattice import Configuration
from contact_lattice.oracle.generator import GeneratorMatrix
from contact_lattice.oracle.solvers import stationary, transient, tv_restricted

VECTORS_SCHEMA_VERSION = 1
ENCODING_NOTE = "base-3, digit = state + 1, site 0 (row-major) most significant"


def oracle_vectors(gen: GeneratorMatrix, initial: Optional[Configuration] = None,
                   site_subset: Sequence[int] = (0,), t_grid: Sequence[float] = (),
                   pi: Optional[np.ndarray] = None) -> Dict[str, Any]:
    """Test vectors: pi and, given an initial configuration, the restricted
    distance to pi along t_grid."""
    pi = stationary(gen) if pi is None else pi
    data: Dict[str, Any] = {
        "schema_version": VECTORS_SCHEMA_VERSION,
        "encoding": ENCODING_NOTE,
        "geometry": gen.geometry.to_dict(),
        "rates": gen.rates.to_dict(),
        "pi": pi.tolist(),
    }
    if initial is not None and len(t_grid):
        data["tv_curve"] = {
            "initial": initial.states.tolist(),
            "site_subset": list(site_subset),
            "t": list(map(float, t_grid)),
            "tv": [tv_restricted(transient(gen, initial, t), pi, site_subset) for t in t_grid],
        }
    return data


def save_vectors(data: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2), encoding="utf-8")
    return path


def load_vectors(path: Union[str, Path]) -> Dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))
