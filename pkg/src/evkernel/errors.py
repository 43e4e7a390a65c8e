"""Exception hierarchy shared by every evkernel module."""


class EvKernelError(Exception):
    """Base class for all errors raised by evkernel."""


# -- frames and subsets ------------------------------------------------------

class FrameError(EvKernelError):
    pass


class EmptyFrame(FrameError):
    pass


class DuplicateAtom(FrameError):
    pass


class FrameTooLarge(FrameError):
    pass


class FrameMismatch(FrameError):
    pass


class EmptyCarrier(FrameError):
    pass


class UnknownAtom(FrameError):
    pass


# -- evidence ----------------------------------------------------------------

class InvalidMass(EvKernelError):
    pass


class InvalidSupport(EvKernelError):
    pass


class NotABeliefFunction(EvKernelError):
    pass


class InvalidWeight(EvKernelError):
    pass


class TotalConflict(EvKernelError):
    pass


# -- rules -------------------------------------------------------------------

class InvalidBound(EvKernelError):
    pass


class InconsistentRule(EvKernelError):
    pass


class EmptyAntecedent(EvKernelError):
    pass


# -- engines -----------------------------------------------------------------

class EmptyInterval(EvKernelError):
    """The admissible interval for p(y), [b(y), 1 - b(not y)], is empty."""


class CertainComplement(EvKernelError):
    """b(not y) = 1, so conditioning on y is undefined."""


class Inconsistent(EvKernelError):
    """A refinement reached bounds with b(x) + b(not x) > 1."""


class NonConvergence(Inconsistent):
    pass


class NegativeMass(EvKernelError):
    """Mass redistribution would drain more than the whole mass of a focal set."""

    def __init__(self, message, witness=None, outflow=None):
        super().__init__(message)
        self.witness = witness
        self.outflow = outflow


# -- oracle ------------------------------------------------------------------

class EmptyPolytope(EvKernelError):
    pass


class AntecedentImpossible(EvKernelError):
    pass


class Unbounded(EvKernelError):
    pass


# -- problem files -----------------------------------------------------------

class ParseError(EvKernelError):
    def __init__(self, message, line=None, field=None):
        super().__init__(message)
        self.line = line
        self.field = field


class ValidationError(EvKernelError):
    pass
