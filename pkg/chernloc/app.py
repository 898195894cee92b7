"""
FastAPI Web Shell for chernloc
Minimal HTTP interface to ReportService
"""

import logging
import os
from typing import Any, Dict, Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from chernloc.config.settings import Settings, get_settings
from chernloc.layers.report.report_service import ReportService
from chernloc.utils.errors import ChernlocError, InputError, InvariantViolation
from chernloc.utils.logging_setup import configure_logging

logger = logging.getLogger(__name__)

# Get port from environment variable, default to 8080
PORT = int(os.getenv("PORT", "8080"))


class RunRequest(BaseModel):
    scene: Optional[str] = Field(default=None, description="Packaged scene name")
    command: str = Field(..., description="Command, e.g. 'chern' or 'verify residue-theorem'")
    flags: Dict[str, Any] = Field(default_factory=dict, description="Command flags")
    params: Dict[str, Any] = Field(default_factory=dict, description="Scene parameter overrides")

    model_config = {
        "json_schema_extra": {"example": {"scene": "p1_od", "command": "chern", "flags": {"q": 1}, "params": {"d": 2}}}
    }


def create_app(settings: Optional[Settings] = None) -> FastAPI:
    settings = settings or get_settings()
    configure_logging(settings.log_level)
    service = ReportService(settings)
    app = FastAPI(title="chernloc")

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_credentials=True,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    def health():
        return "ok"

    @app.get("/scenes")
    def scenes():
        return {"scenes": service.scenes.list_scenes()}

    @app.post("/run")
    def run(request: RunRequest):
        """
        Run one command on a packaged scene and return its report.
        Input problems are 400s; numeric failures are reports with passed = false
        or 422s when a numeric step raised.
        """
        # Scenes are resolved by name only; paths stay local to the CLI
        if request.scene is not None and os.path.basename(request.scene) != request.scene:
            raise HTTPException(status_code=400, detail="scene must be a packaged scene name")
        try:
            report = service.run(request.command, request.scene, request.flags, request.params or None)
        except (InputError, FileNotFoundError, InvariantViolation) as e:
            raise HTTPException(status_code=400, detail=str(e))
        except ChernlocError as e:
            logger.error("[APP] command=%s failed: %s", request.command, e)
            raise HTTPException(status_code=422, detail=f"{type(e).__name__}: {e}")
        return report.model_dump(mode="json", by_alias=True)

    return app


# Create app instance - the entry point for uvicorn chernloc.app:app
app = create_app()


if __name__ == "__main__":
    import uvicorn

    uvicorn.run(app, host="0.0.0.0", port=PORT)
