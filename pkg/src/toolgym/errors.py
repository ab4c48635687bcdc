"""Exception types shared across the package."""

from __future__ import annotations


class GymError(Exception):
    """Base error carrying a machine-readable code."""

    def __init__(self, code: str, message: str, **context: object):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message
        self.context = context


class GraphError(GymError):
    pass


class PipelineError(GymError):
    """Raised by a construction stage; ``stage`` names the failing stage."""

    def __init__(self, code: str, message: str, stage: str = "", **context: object):
        super().__init__(code, message, **context)
        self.stage = stage


class BackendFailure(PipelineError):
    """LLM-backed generation produced unusable output; ``raw`` holds the payload."""

    def __init__(self, message: str, raw: object = None, stage: str = "generate"):
        super().__init__("BACKEND_FAILURE", message, stage=stage)
        self.raw = raw


class DeployError(PipelineError):
    pass


class EngineError(GymError):
    pass


class StoreError(GymError):
    pass
