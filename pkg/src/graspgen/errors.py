"""Exception types shared across the package.

Every error carries a short machine-parseable ``category`` string; the CLI
prints it on failure so scripts can branch on it without scraping messages.
"""


class GraspGenError(Exception):
    category = "error"


class InvalidGeometryError(GraspGenError):
    """Rectangle with zero area / zero-area union / malformed vertex set."""
    category = "invalid-geometry"


class DegenerateGraspError(GraspGenError):
    """Grasp with zero width cannot be turned back into a rectangle."""
    category = "degenerate-grasp"


class UndefinedAngleError(GraspGenError):
    """Angle requested from (sin, cos) == (0, 0)."""
    category = "undefined-angle"


class ParseError(GraspGenError):
    """Malformed on-disk dataset file."""
    category = "parse-error"


class InvalidConfigError(GraspGenError):
    """Bad configuration value or unknown config key."""
    category = "invalid-config"


class InvalidInputError(GraspGenError):
    """Operation called with arguments outside its contract."""
    category = "invalid-input"


class InvalidSceneError(GraspGenError):
    """Scene that cannot be preprocessed (e.g. no valid depth at all)."""
    category = "invalid-scene"


class InvalidSpecError(GraspGenError):
    """Model spec whose shapes cannot be assembled."""
    category = "invalid-spec"


class InvalidAssemblyError(GraspGenError):
    """Model parts whose shapes do not fit together."""
    category = "invalid-assembly"


class InvalidExtrinsicError(GraspGenError):
    """Extrinsic whose rotation block is not a proper rotation."""
    category = "invalid-extrinsic"


class NoDepthError(GraspGenError):
    """No valid depth available at or around the requested pixel."""
    category = "no-depth"


class TrainingDivergedError(GraspGenError):
    """Loss became NaN/inf; carries the last batch ids for diagnosis."""
    category = "training-diverged"


class VersionError(GraspGenError):
    """Checkpoint / cache written by an incompatible version."""
    category = "version-mismatch"
