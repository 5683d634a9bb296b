"""Exception types shared across the package."""


class NmfDimError(Exception):
    """Base class for every error raised by this package."""


class InvalidConfigError(NmfDimError):
    """A configuration value or argument violates its contract."""


class NonFiniteError(NmfDimError):
    """An input matrix contains NaN or Inf entries."""


class NotSquareError(NmfDimError):
    """A square matrix was required."""


class NotSymmetricError(NmfDimError):
    """A symmetric matrix was required."""


class MatrixIOError(NmfDimError):
    """The underlying file could not be read or written."""


class MatrixParseError(NmfDimError):
    """The file content is not a valid numeric matrix."""


class RaggedRowsError(MatrixParseError):
    """CSV rows have inconsistent column counts."""


class TooFewSamplesError(NmfDimError):
    """The sample dimension is too small for the requested statistic."""


class DimensionTooLargeError(NmfDimError):
    """The problem size exceeds a hard guard (dense tensor path)."""


class DimensionMismatchError(NmfDimError):
    """Operand shapes do not conform."""


class DegenerateKurtosisError(NmfDimError):
    """The latent law has zero excess kurtosis; the moment matrix is blind to it."""


class ZeroColumnError(NmfDimError):
    """The dictionary has an all-zero column."""


class UnsupportedOrderError(NmfDimError):
    """A raw moment of unsupported order was requested."""


class NoFeasibleScaleError(NmfDimError):
    """No tail scale on the search grid satisfies the requested gap."""


class ShapeMismatchError(NmfDimError):
    """Data cannot be reshaped to the requested image geometry."""


class SupportMismatchError(NmfDimError):
    """A candidate solution has mass outside the declared support."""


class SingularGramError(NmfDimError):
    """A Gram matrix that must be invertible is numerically singular."""


class SingularBlockError(SingularGramError):
    """The selected row block of the dictionary is numerically singular."""


class RankDeficientError(NmfDimError):
    """The dictionary does not have full column rank."""


class InfeasibleGapError(NmfDimError):
    """No support choice yields a positive irrepresentability gap."""
