"""Exception hierarchy shared by all modules."""


class UTBNError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(UTBNError):
    """A digraph does not have the shape an operation requires."""


class ChildlessVertexError(StructuralError):
    def __init__(self, vertex):
        super().__init__(f"tree vertex {vertex} retains no child")
        self.vertex = vertex


class DisconnectedError(StructuralError):
    def __init__(self, vertices):
        vertices = sorted(vertices)
        super().__init__(f"{len(vertices)} vertices unreachable from the root: {vertices[:10]}")
        self.vertices = vertices


class InvalidChoiceError(UTBNError, ValueError):
    """A reticulation choice does not fit the network it is applied to."""


class CapExceededError(UTBNError):
    def __init__(self, reticulations, cap):
        super().__init__(f"network has {reticulations} reticulations, cap is {cap}")
        self.reticulations = reticulations
        self.cap = cap


class NewickParseError(UTBNError, ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ShapeMismatchError(UTBNError, ValueError):
    pass


class LabelMismatchError(UTBNError, ValueError):
    pass


class FingerprintMismatchError(UTBNError, ValueError):
    pass


class InternalInvariantError(UTBNError, AssertionError):
    """Raised when an algorithm produces a result its own checks reject.

    This never signals bad input; it means the implementation is wrong.
    """
