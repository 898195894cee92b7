"""
Scene Service
=============
This service handles the scene layer responsibilities:
- Resolving scene names against the packaged scenes directory
- Loading and validating scene files (JSON, pydantic schema)
- Building the scene objects and running the load-time sampled checks
- Listing the packaged scenes
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

from pydantic import ValidationError

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.bundles.bundles_service import BundlesService
from chernloc.layers.geometry.geometry_service import GeometryService
from chernloc.layers.scene.scene import Scene, build_scene
from chernloc.models.data_models import SceneFile
from chernloc.utils.errors import SceneError

logger = logging.getLogger(__name__)


class SceneService:
    """
    Service class for scene files.
    """

    def __init__(self, settings: Optional[Settings] = None, scenes_dir: Optional[Union[str, Path]] = None):
        """
        Initialize the scene service.

        Args:
            settings: Optional settings; defaults to the process-wide settings
            scenes_dir: Optional directory of named scenes; defaults to settings.scenes_dir
        """
        self.settings = settings or get_settings()
        self.scenes_dir = Path(scenes_dir) if scenes_dir is not None else Path(self.settings.scenes_dir)

    def resolve(self, name_or_path: Union[str, Path]) -> Path:
        """
        A scene path: an existing file, or a bare name looked up in the scenes directory.

        Raises:
            FileNotFoundError: If neither exists
        """
        path = Path(name_or_path)
        if path.is_file():
            return path
        for candidate in (self.scenes_dir / path.name, self.scenes_dir / f"{path.name}.json"):
            if candidate.is_file():
                return candidate
        raise FileNotFoundError(f"Scene file not found: {name_or_path}")

    def read(self, name_or_path: Union[str, Path]) -> SceneFile:
        """
        Parse and validate a scene file without building it.

        Raises:
            FileNotFoundError: If the scene cannot be found
            SceneError: If the file is not valid JSON or does not match the schema
        """
        path = self.resolve(name_or_path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise SceneError(f"{path.name}: invalid JSON: {e}") from e
        return self.parse(data, path.name)

    @staticmethod
    def parse(data: Mapping, origin: str = "<scene>") -> SceneFile:
        try:
            return SceneFile.model_validate(data)
        except ValidationError as e:
            first = e.errors()[0]
            where = ".".join(str(part) for part in first["loc"])
            raise SceneError(f"{origin}: {where}: {first['msg']}") from e

    def build(self, file: SceneFile, overrides: Optional[Mapping[str, object]] = None, check: bool = True) -> Scene:
        """
        Build a scene and, unless check is False, run the sampled compatibility checks.

        Raises:
            SceneError: On bad references or missing prerequisite sections
            InvariantViolation: On the first failing sampled check, named with its sample point
            DegenerateOverlapError: If covering disks overlap
        """
        scene = build_scene(file, overrides)
        if check:
            self.check(scene)
        return scene

    def load_scene(self, name_or_path: Union[str, Path], overrides: Optional[Mapping[str, object]] = None) -> Scene:
        """
        Load, build and check a scene.

        Args:
            name_or_path: scene file path or packaged scene name
            overrides: parameter values replacing the file's

        Returns:
            The checked Scene
        """
        scene = self.build(self.read(name_or_path), overrides)
        logger.info("[SCENE] loaded name=%s", scene.name)
        return scene

    def check(self, scene: Scene) -> None:
        geometry = GeometryService(self.settings)
        bundles = BundlesService(self.settings)
        geometry.check_atlas(scene.atlas)
        if scene.covering is not None:
            scene.covering.check_disjoint()
            geometry.check_adapted_set(scene.covering)
        if scene.bundle is not None:
            bundles.check_cocycle(scene.bundle)
        for section in scene.sections.values():
            bundles.check_section(section)
        for connection in scene.connections.values():
            if connection.domain.kind == "all":
                bundles.check_connection(connection)
        logger.debug("[SCENE] checks passed name=%s", scene.name)

    def list_scenes(self) -> List[Dict[str, str]]:
        """Name, description and file of every packaged scene, sorted by name."""
        scenes = []
        for path in sorted(self.scenes_dir.glob("*.json")):
            try:
                file = self.read(path)
            except SceneError as e:
                logger.warning("[SCENE] skipping %s: %s", path.name, e)
                continue
            scenes.append({"name": file.name, "description": file.description, "file": path.name})
        return scenes
