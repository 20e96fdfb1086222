"""Exception types raised across ubblab."""


class UbbLabError(Exception):
    pass


class DimensionMismatch(UbbLabError, ValueError):
    pass


class ZeroState(UbbLabError, ValueError):
    pass


class NonOrthonormalInput(UbbLabError, ValueError):
    pass


class NonFinite(UbbLabError, ValueError):
    pass


class EmptyConstraintSet(UbbLabError, ValueError):
    pass


class EmptySubspace(UbbLabError, ValueError):
    pass


class IndexOutOfRange(UbbLabError, IndexError):
    pass


class LayerOutOfRange(UbbLabError, ValueError):
    pass


class AmbiguousCell(UbbLabError, ValueError):
    """Two basis states share a computational index."""


class NonUnitAmplitude(UbbLabError, ValueError):
    pass


class BranchBudgetExceeded(UbbLabError, RuntimeError):
    pass


class LongRunningRequired(UbbLabError, RuntimeError):
    pass
