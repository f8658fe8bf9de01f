class GridMismatchError(ValueError):
    """Two profiles in a binary operation live on different grids."""


class SingularGeometryError(ValueError):
    """The pixel layout makes the gain equations singular."""


class DegeneracyMismatchError(ValueError):
    """Profiles expected to coincide (mirror pairs) differ beyond tolerance."""


class ConfigError(ValueError):
    """Invalid run configuration; the message names the failing constraint."""
