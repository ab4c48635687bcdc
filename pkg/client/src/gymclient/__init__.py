"""Thin client for driving remote gym episodes over the line-JSON protocol."""

from .errors import (
    GymClientError,
    NeedsResetError,
    NotFoundError,
    ProtocolError,
    ServiceError,
    StepAfterDoneError,
)
from .session import ClientSession, EpisodeRecord, Observation, StepResult, export_records

__version__ = "0.1.0"

__all__ = [
    "ClientSession",
    "EpisodeRecord",
    "GymClientError",
    "NeedsResetError",
    "NotFoundError",
    "Observation",
    "ProtocolError",
    "ServiceError",
    "StepAfterDoneError",
    "StepResult",
    "export_records",
]
