"""Panza pipeline: turn a personal email archive into a style-tuned assistant.

Subpackages cover the full path from raw mailbox to evaluation:
ingest -> instructions -> ragstore -> raft -> gateway -> metrics,
orchestrated by the ``panza`` CLI.
"""

__version__ = "0.1.0"
