"""Exception hierarchy shared by all holoflow modules."""


class HoloflowError(ValueError):
    """Base class for every error raised by holoflow."""


class ShapeError(HoloflowError):
    pass


class NonFiniteError(HoloflowError):
    pass


class EmptySpan(HoloflowError):
    pass


class NotOrthonormal(HoloflowError):
    pass


class NotHermitian(HoloflowError):
    pass


class NotUnitary(HoloflowError):
    pass


class ConvergenceError(HoloflowError):
    pass


class NoRoomForExtension(HoloflowError):
    """The subspace fills the whole ambient space, so no e_{m+1} exists."""


class LoopNotClosed(HoloflowError):
    """exp(H) does not map the subspace to itself; the restriction is undefined."""
