"""Version identifiers with release/rc ordering.

Grammar: ``major.minor[.patch][ rcN | -rcN | rcN]`` with non-negative
components. An rc-tagged version sorts *before* the untagged release it
precedes (5.17-rc3 < 5.17), and rc numbers order among themselves.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

from .errors import ParseError

_VERSION_RE = re.compile(
    r"""^v?
        (?P<major>\d+)\.(?P<minor>\d+)
        (?:\.(?P<patch>\d+))?
        (?:[\s\-_.]?rc(?P<rc>\d+))?
        $""",
    re.VERBOSE,
)


@total_ordering
@dataclass(frozen=True)
class VersionId:
    major: int
    minor: int
    patch: int = 0
    rc: int | None = None

    def __post_init__(self) -> None:
        if self.major < 0 or self.minor < 0 or self.patch < 0:
            raise ValueError("version components must be non-negative")
        if self.rc is not None and self.rc < 1:
            raise ValueError("rc number must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "VersionId":
        m = _VERSION_RE.match(text.strip())
        if not m:
            raise ParseError(f"malformed version string: {text!r}", token=text)
        return cls(
            major=int(m.group("major")),
            minor=int(m.group("minor")),
            patch=int(m.group("patch") or 0),
            rc=int(m.group("rc")) if m.group("rc") else None,
        )

    def _key(self) -> tuple[int, int, int, int, int]:
        # rc-tagged precedes the untagged release of the same triple
        return (self.major, self.minor, self.patch, 0 if self.rc is not None else 1, self.rc or 0)

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, VersionId):
            return NotImplemented
        return self._key() < other._key()

    @property
    def release(self) -> "VersionId":
        """The untagged release this version belongs to (identity if untagged)."""
        if self.rc is None:
            return self
        return VersionId(self.major, self.minor, self.patch)

    def __str__(self) -> str:
        s = f"{self.major}.{self.minor}"
        if self.patch:
            s += f".{self.patch}"
        if self.rc is not None:
            s += f"-rc{self.rc}"
        return s
