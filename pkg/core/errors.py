"""
SwarmWave Errors

Exception hierarchy shared by the geometry, symmetry, protocol and simulator
modules. Pure operations raise these; the simulator and the CLI turn them into
trace terminations and exit codes.
"""

from typing import Sequence, Tuple


class SwarmWaveError(Exception):
    """Base class for every error raised by swarmwave"""


class GeometryError(SwarmWaveError):
    """Invalid geometric input (empty set, disconnected graph, point outside a chart)"""


class SymmetryError(SwarmWaveError):
    """Symmetry detection or application failed"""


class AmbiguousMatchError(SymmetryError):
    """Two robots lie within tolerance of the same rotated target"""

    def __init__(self, source: int, candidates: Sequence[int], angle: float):
        self.source = source
        self.candidates: Tuple[int, ...] = tuple(int(c) for c in candidates)
        self.angle = angle
        super().__init__(
            f"ambiguous match for robot {source} under rotation {angle:.6f}: "
            f"robots {list(self.candidates)} are all within tolerance"
        )


class SizeMismatchError(SymmetryError):
    """Permutation size does not match the configuration size"""


class ProtocolError(SwarmWaveError):
    """A protocol step could not be carried out"""


class PreconditionError(ProtocolError):
    """A protocol precondition does not hold for the configuration"""

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        self.detail = detail
        message = f"precondition '{check}' failed"
        if detail:
            message += f": {detail}"
        super().__init__(message)


class InversionError(ProtocolError):
    """The observer could not reconstruct the previous configuration"""


class ScenarioError(SwarmWaveError):
    """A scenario file or override is invalid"""

    def __init__(self, field: str, detail: str):
        self.field = field
        self.detail = detail
        super().__init__(f"invalid scenario field '{field}': {detail}")


class TraceExportError(SwarmWaveError):
    """The trace files could not be written"""

    def __init__(self, path: str):
        self.path = path
        super().__init__(f"could not write trace files to '{path}'")
