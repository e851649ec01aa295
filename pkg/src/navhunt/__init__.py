"""Authoritative session server for collaborative treasure-hunt
navigation training: asymmetric hunter/radio/trainer roles, obstacle
authoring, visibility-filtered state sync, timed validation, and a
deterministic event log that replays into an interactive debrief."""

__version__ = "0.1.0"
