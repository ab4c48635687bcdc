"""Typed exceptions surfacing in-band service errors."""

from __future__ import annotations


class GymClientError(Exception):
    pass


class ProtocolError(GymClientError):
    """The peer broke the line-JSON framing or echoed the wrong request."""


class ServiceError(GymClientError):
    """In-band error answer from the service."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class NotFoundError(ServiceError):
    pass


class NeedsResetError(ServiceError):
    pass


class StepAfterDoneError(GymClientError):
    """Raised client-side before any network traffic."""


def error_from_payload(payload: dict) -> ServiceError:
    code = payload.get("code", "UNKNOWN")
    message = payload.get("message", "")
    if code == "NOT_FOUND":
        return NotFoundError(code, message)
    if code == "NEEDS_RESET":
        return NeedsResetError(code, message)
    return ServiceError(code, message)
