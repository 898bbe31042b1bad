"""Exception taxonomy shared by all qcalc modules."""


class QcalcError(Exception):
    """Base class for all qcalc errors."""


class DisjointnessError(QcalcError):
    """Factor labels overlap where disjoint support is required."""


class LabelError(QcalcError):
    """Unknown factor label, or a label set that is not nested as required."""


class ShapeError(QcalcError):
    """Matrix or factor-space shape mismatch."""


class SpaceError(QcalcError):
    """Two paired objects do not live on compatible factor spaces."""


class InvariantError(QcalcError):
    """A value fails the structural invariant of its type."""


class DegenerateOrbitError(QcalcError):
    """Conditioning on a result of (numerically) zero probability."""


class ConsonanceError(QcalcError):
    """The two bindles cannot be observed together without interference."""


class PeggingError(QcalcError):
    """An orbit or bindle required to have unit norm does not."""


class LengthError(QcalcError):
    """Outcome sequences of unequal length were paired."""


class ConfigError(QcalcError):
    """Invalid configuration value or unknown named object."""
