"""Exception hierarchy.  Every error carries a machine-parsable token that the
CLI prints as ``error=<TOKEN>`` on failure."""

from __future__ import annotations


class SwError(Exception):
    token = "ERROR"


class SingularMatrixError(SwError):
    token = "SINGULAR"


class BudgetExceededError(SwError):
    token = "BUDGET_EXCEEDED"


class NotInImageError(SwError):
    token = "NOT_IN_IMAGE"


class SyndromeNotDecodableError(SwError):
    token = "SYNDROME_NOT_DECODABLE"


class NotHammingPartitionError(SwError):
    token = "NOT_HAMMING_PARTITION"


class RNotInvertibleError(SwError):
    token = "R_NOT_INVERTIBLE"


class HeightNegativeError(SwError):
    token = "HEIGHT_NEGATIVE"


class DecompositionInvalidError(SwError):
    token = "DECOMPOSITION_INVALID"


class NotPerfectError(SwError):
    token = "NOT_PERFECT"


class ParamsNotPerfectError(SwError):
    token = "PARAMS_NOT_PERFECT"


class MalformedFileError(SwError):
    token = "MALFORMED_FILE"
