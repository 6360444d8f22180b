"""
Error types raised by the spanner library.

Every user-facing failure is a ``SpanlabError`` (a ``ValueError``) so that
engines can catch one type and turn it into a failed result.
"""


class SpanlabError(ValueError):
    """Base class for all library errors."""


class AsymmetricMatrix(SpanlabError):
    def __init__(self, i: int, j: int, a: float, b: float):
        self.pair = (i, j)
        super().__init__(f"Distance matrix is not symmetric at ({i}, {j}): {a!r} != {b!r}")


class NonpositiveDistance(SpanlabError):
    def __init__(self, i: int, j: int, value: float):
        self.pair = (i, j)
        super().__init__(f"Distance between distinct points ({i}, {j}) must be > 0, got {value!r}")


class TriangleViolation(SpanlabError):
    """Carries the witness triple (i, j, k) with d(i,j) > d(i,k) + d(k,j)."""

    def __init__(self, i: int, j: int, k: int, dij: float, dik: float, dkj: float):
        self.witness = (i, j, k)
        super().__init__(
            f"Triangle inequality violated at ({i}, {j}) via {k}: "
            f"{dij:g} > {dik:g} + {dkj:g}"
        )


class SinglePoint(SpanlabError):
    """A metric graph needs at least two points."""


class SingleVertex(SpanlabError):
    """An MST summary needs at least two vertices."""


class InvalidVertex(SpanlabError):
    def __init__(self, vertex: int, n: int):
        self.vertex = vertex
        super().__init__(f"Vertex {vertex} out of range for graph with {n} vertices")


class DisconnectedGraph(SpanlabError):
    """The input graph has no spanning tree."""


class NotInBall(SpanlabError):
    def __init__(self, index: int, distance: float, radius: float):
        self.index = index
        super().__init__(f"Point {index} lies at distance {distance:g} > R = {radius:g} from the center")


class PairTooClose(SpanlabError):
    def __init__(self, i: int, j: int, distance: float, r: float):
        self.pair = (i, j)
        super().__init__(f"Points {i} and {j} are {distance:g} apart, not > r = {r:g}")


class InvalidEps(SpanlabError):
    def __init__(self, eps: float):
        self.eps = eps
        super().__init__(f"eps must lie in (0, 1), got {eps!r}")


class EpsOutOfRange(SpanlabError):
    """Stream index j or analysis eps outside the admissible range."""


class UncoveredEndpoint(SpanlabError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"Edge endpoint {vertex} is not covered by any cluster")


class OrphanComponent(SpanlabError):
    """A low-diameter component with no MST edge to any level-i cluster."""


class InsufficientCredit(SpanlabError):
    def __init__(self, account: object, needed: float, available: float):
        self.account = account
        self.needed = needed
        self.available = available
        super().__init__(
            f"Account {account} cannot cover {needed:.6g} (available {available:.6g})"
        )


class CanonicalPairNotFound(SpanlabError):
    def __init__(self, cluster_id: int, reason: str):
        self.cluster_id = cluster_id
        self.reason = reason
        super().__init__(f"No canonical pair for cluster {cluster_id}: {reason}")


class BadSpec(SpanlabError):
    """Invalid instance-generator specification."""


class BadInputFile(SpanlabError):
    """Malformed point, matrix or spanner file."""


class CreditOverflowAssertion(AssertionError):
    """Initial credit exceeded 2·c·w(MST): the subdivision is wrong."""
