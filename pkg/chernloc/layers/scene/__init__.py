"""
Scene Layer Package
===================
This package contains the loading, validation and building of scene files.

Exports:
    SceneService: Main service class for the scene layer
    Scene: A built scene with its charts, bundle, connections and self-checks
    build_scene: Build the objects of a validated scene file
"""

from .scene import Scene, build_scene
from .scene_service import SceneService

__all__ = [
    "SceneService",
    "Scene",
    "build_scene",
]
