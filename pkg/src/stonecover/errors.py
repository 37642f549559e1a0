"""Exception hierarchy shared by all modules."""


class StoneError(Exception):
    """Base class for every error raised by this package."""


class InvalidMatrix(StoneError, ValueError):
    """A distance matrix is not a valid finite metric."""


class AsymmetricMatrix(InvalidMatrix):
    def __init__(self, i: int, j: int, dij: float, dji: float):
        self.witness = (i, j)
        super().__init__(f"dist[{i}][{j}]={dij!r} != dist[{j}][{i}]={dji!r}")


class NegativeDistance(InvalidMatrix):
    def __init__(self, i: int, j: int, value: float):
        self.witness = (i, j)
        super().__init__(f"dist[{i}][{j}]={value!r} < 0")


class DegenerateDistance(InvalidMatrix):
    """Zero off-diagonal distance or nonzero diagonal entry."""

    def __init__(self, i: int, j: int, value: float):
        self.witness = (i, j)
        super().__init__(f"dist[{i}][{j}]={value!r} violates identity of indiscernibles")


class TriangleViolation(InvalidMatrix):
    def __init__(self, i: int, j: int, k: int, excess: float):
        # d(i,k) > d(i,j) + d(j,k)
        self.witness = (i, j, k)
        self.excess = excess
        super().__init__(f"dist[{i}][{k}] exceeds dist[{i}][{j}] + dist[{j}][{k}] by {excess!r}")


class BadParams(StoneError, ValueError):
    pass


class NotACover(StoneError, ValueError):
    def __init__(self, message: str, uncovered=()):
        self.uncovered = tuple(uncovered)
        super().__init__(message)


class NotVectorSpace(StoneError, TypeError):
    pass


class BadTree(StoneError, ValueError):
    pass


class CliqueCapExceeded(StoneError, RuntimeError):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(f"maximal clique enumeration exceeded the cap of {cap} cliques")


class TooLarge(StoneError, ValueError):
    pass


class UncertifiableScale(StoneError, RuntimeError):
    def __init__(self, scale: int, reason: str):
        self.scale = scale
        super().__init__(f"scale n={scale}: {reason}")


class MonotonicityViolation(StoneError, AssertionError):
    pass
