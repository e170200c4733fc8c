"""Crowd task allocation: event-sourced state plus an HTTP front end."""

from .http import create_app
from .state import DEFAULT_LEASE_SECONDS, TaskService

__all__ = ["TaskService", "DEFAULT_LEASE_SECONDS", "create_app"]
