"""Exception types shared across the library."""


class ToyshtError(Exception):
    """Base class for all library errors."""


class NonPrimeError(ToyshtError, ValueError):
    """The characteristic passed to a field constructor is not prime."""


class ReducibleModulusError(ToyshtError, RuntimeError):
    """Deterministic modulus search exhausted without an irreducible polynomial."""


class BudgetExceededError(ToyshtError, ValueError):
    """An enumeration or construction exceeds the configured size budget."""


class DimensionMismatchError(ToyshtError, ValueError):
    """Operands have incompatible ambient or map dimensions."""


class TrivialPointError(ToyshtError, ValueError):
    """A Frobenius-fixed point was passed where a nontrivial one is required."""


class NotAToyShtukaError(ToyshtError, ValueError):
    """The subspace violates the rank-at-most-one intersection condition."""


class InvalidFlagError(ToyshtError, ValueError):
    """A nested pair violates its left/right flag invariants."""


class SumNotZeroError(ToyshtError, ValueError):
    """A coefficient function that must sum to zero does not."""


class NotAdmissibleError(ToyshtError, ValueError):
    """The lattice pair violates the admissibility bounds on the dimension theory."""


class NotInvariantError(ToyshtError, ValueError):
    """A function required to be constant on scalar orbits is not."""


class LatticeNotNestedError(ToyshtError, ValueError):
    """The smaller lattice is not contained in the larger one."""


class WrongIndexError(ToyshtError, ValueError):
    """A lattice does not sit at the dimension-theory value the operation needs."""


class WrongChainError(ToyshtError, ValueError):
    """A lattice chain violates the required nesting or index values."""


class NotOnVarietyError(ToyshtError, ValueError):
    """A matrix point does not lie on the rank-at-most-one locus."""


class TruncationTooShortError(ToyshtError, RuntimeError):
    """A series valuation hit the truncation order; retry with a longer one."""


class FiberEmptyError(ToyshtError, ValueError):
    """An Artin-Schreier fiber has no rational point over the working field."""


class UnknownCheckError(ToyshtError, KeyError):
    """The check name is not registered with the batch driver."""


class ConfigParseError(ToyshtError, ValueError):
    """A suite configuration file could not be parsed."""
