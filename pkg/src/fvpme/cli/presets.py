"""
Named presets loaded from YAML and initial-profile construction.
"""

from pathlib import Path
from typing import Any, Callable, Dict, Optional, Union

import numpy as np
import yaml

from src.fvpme.config import settings
from src.fvpme.core.enums import InitialPreset
from src.fvpme.core.exceptions import ConfigError
from src.fvpme.core.logging import get_logger
from src.fvpme.discrete.fields import CellVector
from src.fvpme.discrete.io import read_cell_csv
from src.fvpme.lab.references import ReferenceSolution, barenblatt, heat_sine, mesh_box
from src.fvpme.mesh.geometry import AdmissibleMesh

logger = get_logger(__name__)

InitialData = Union[CellVector, Callable[[np.ndarray], np.ndarray]]


class PresetLibrary:
    """
    Initial profiles, refinement studies and selftest thresholds.

    Loads initial_data.yaml, convergence.yaml and selftest.yaml from the
    preset directory; a missing file yields an empty mapping.
    """

    def __init__(self, presets_dir: Optional[Path] = None):
        """
        Initialize the library.

        Args:
            presets_dir: Directory containing the preset YAML files
        """
        self.presets_dir = Path(presets_dir) if presets_dir is not None else settings.presets_dir
        self.initial_data: Dict[str, Dict[str, Any]] = {}
        self.convergence: Dict[str, Dict[str, Any]] = {}
        self.selftest: Dict[str, Any] = {}
        self._load_presets()

    def _load(self, name: str) -> Dict[str, Any]:
        path = self.presets_dir / name
        if not path.exists():
            logger.debug("Preset file not found", extra={"file": str(path)})
            return {}
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
        if not isinstance(data, dict):
            raise ConfigError("preset file must hold a mapping", details={"file": str(path)})
        return data

    def _load_presets(self) -> None:
        self.initial_data = self._load("initial_data.yaml").get("profiles", {})
        self.convergence = self._load("convergence.yaml").get("studies", {})
        self.selftest = self._load("selftest.yaml")

    def initial_profile(self, kind: InitialPreset, name: Optional[str] = None) -> Dict[str, Any]:
        """
        Parameters of a named profile; ``name`` defaults to the kind.

        Raises:
            ConfigError: an explicitly named profile is unknown or of another kind
        """
        kind = InitialPreset(kind)
        key = name or kind.value
        entry = self.initial_data.get(key)
        if entry is None:
            if name is not None:
                raise ConfigError("unknown initial profile", details={"preset": name})
            return {}
        params = dict(entry)
        declared = params.pop("kind", kind.value)
        if InitialPreset(declared) != kind:
            raise ConfigError(
                "initial profile is of another kind",
                details={"preset": key, "kind": declared, "expected": kind.value}
            )
        return params

    def study(self, name: str) -> Dict[str, Any]:
        """
        Parameters of a named refinement study.

        Raises:
            ConfigError: unknown study
        """
        if name not in self.convergence:
            raise ConfigError("unknown convergence study", details={"study": name})
        return dict(self.convergence[name])

    def threshold(self, key: str, default: Any) -> Any:
        return self.selftest.get(key, default)


def _center(mesh: AdmissibleMesh, params: Dict[str, Any]) -> np.ndarray:
    if "center" in params:
        return np.atleast_1d(np.asarray(params["center"], dtype=float))
    lo, hi = mesh_box(mesh)
    return 0.5 * (lo + hi)


def reference_for(
    kind: InitialPreset,
    params: Dict[str, Any],
    mesh: AdmissibleMesh,
    q: float
) -> Optional[ReferenceSolution]:
    """Exact solution matching an initial profile; None for profiles without one."""
    kind = InitialPreset(kind)
    if kind == InitialPreset.BARENBLATT:
        return barenblatt(
            q,
            mesh.dim,
            t0=float(params.get("t0", 0.1)),
            mass=float(params.get("mass", 1.0)),
            center=_center(mesh, params),
        )
    if kind == InitialPreset.HEAT_SINE:
        return heat_sine(
            mesh_box(mesh),
            amplitude=float(params.get("amplitude", 1.0)),
            offset=float(params.get("offset", 0.0)),
            mode=int(params.get("mode", 1)),
        )
    return None


def initial_data(
    kind: InitialPreset,
    params: Dict[str, Any],
    mesh: AdmissibleMesh,
    q: float,
    resolve: Callable[[str], Path] = Path
) -> InitialData:
    """
    Initial function or cell vector of a profile.

    Args:
        kind: profile kind
        params: profile parameters (preset entry merged with overrides)
        mesh: mesh the run lives on
        q: exponent, used by the Barenblatt profile
        resolve: maps the ``file`` parameter to a path

    Raises:
        ConfigError: missing parameter or a reference profile that does not apply
    """
    kind = InitialPreset(kind)
    if kind == InitialPreset.CONSTANT:
        value = float(params.get("value", 1.0))
        return CellVector.constant(mesh, value)

    if kind == InitialPreset.BOX:
        lo_box, hi_box = mesh_box(mesh)
        extent = hi_box - lo_box
        lo = np.broadcast_to(np.asarray(params.get("lo", lo_box + 0.25 * extent), dtype=float), (mesh.dim,))
        hi = np.broadcast_to(np.asarray(params.get("hi", hi_box - 0.25 * extent), dtype=float), (mesh.dim,))
        height = float(params.get("height", 1.0))

        def box(points: np.ndarray) -> np.ndarray:
            points = np.atleast_2d(points)
            inside = np.all((points >= lo) & (points <= hi), axis=1)
            return np.where(inside, height, 0.0)
        return box

    if kind == InitialPreset.FILE:
        if "file" not in params:
            raise ConfigError("file profile needs a file", details={"key": "model.file"})
        return read_cell_csv(resolve(params["file"]), mesh)

    if kind == InitialPreset.BARENBLATT and not q > 1.0:
        raise ConfigError("Barenblatt profiles need q > 1", details={"key": "model.q", "q": q})
    reference = reference_for(kind, params, mesh, q)
    return reference.at(0.0)
