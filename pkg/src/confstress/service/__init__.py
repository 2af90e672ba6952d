from .manifest import WorkspaceManifest, load_manifest
from .workspace import ingest_workspace, load_workspace_catalog

__all__ = [
    "WorkspaceManifest",
    "ingest_workspace",
    "load_manifest",
    "load_workspace_catalog",
]
