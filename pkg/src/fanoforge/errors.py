"""Exception types shared across modules.

Every domain error carries a short machine-readable name (the class name)
that the CLI reports on stderr.
"""


class FanoForgeError(Exception):
    pass


class NonPrimitiveWeight(FanoForgeError):
    pass


class NonUnimodular(FanoForgeError):
    pass


class DimensionMismatch(FanoForgeError):
    pass


class NotFullDimensional(FanoForgeError):
    pass


class OriginNotInterior(FanoForgeError):
    pass


class NotLowDimensional(FanoForgeError):
    pass


class VarCountMismatch(FanoForgeError):
    pass


class ZeroPolynomial(FanoForgeError):
    pass


class NotMutable(FanoForgeError):
    pass


class RankDeficient(FanoForgeError):
    pass


class UnsupportedRank(FanoForgeError):
    pass


class StabilityOnWall(FanoForgeError):
    pass


class InfiniteFamily(FanoForgeError):
    pass


class HomogenizationFailure(FanoForgeError):
    pass


class NoEliminableBundle(FanoForgeError):
    pass


class NoBasis(FanoForgeError):
    pass


class SchemaViolation(FanoForgeError):
    pass


class IoFailure(FanoForgeError):
    pass
