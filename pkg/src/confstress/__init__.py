"""confstress: stress-test toolkit for container deployment configurations.

Models a deployment as a knowledge graph, vulnerabilities as goal-rooted
AND/OR graphs over configuration assumptions, and guides the operator to
a safer configuration via AHP-ranked fixes.
"""

from .versions import VersionId

__version__ = "0.1.0"

__all__ = ["VersionId", "__version__"]
