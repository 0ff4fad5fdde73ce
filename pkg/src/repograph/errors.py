"""Exception types raised across the package."""

from __future__ import annotations


class RepoGraphError(Exception):
    """Base class for every error raised by repograph."""


class NodeNotFound(RepoGraphError, KeyError):
    pass


class InvalidArgument(RepoGraphError, ValueError):
    pass


class IoError(RepoGraphError, OSError):
    """Worktree or index files could not be read or written."""


class StaleManifest(RepoGraphError):
    """A diff does not agree with the file set of the graph it is applied to."""


class MissingCommunities(RepoGraphError):
    pass


class SidecarNotFound(RepoGraphError, FileNotFoundError):
    pass


class StaleSidecar(RepoGraphError):
    """A sidecar record was written for a different snapshot than the manifest expects."""


class InfeasibleSpec(RepoGraphError, ValueError):
    pass
