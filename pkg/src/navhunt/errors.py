"""Error taxonomy shared across the server.

Every refusal the wire protocol can emit maps to one of these classes;
``nack`` frames carry ``type(exc).__name__`` so clients can switch on it.
"""


class HuntError(Exception):
    """Base class for all domain errors."""

    def __init__(self, detail: str = ""):
        super().__init__(detail)
        self.detail = detail


# -- building file / geometry --------------------------------------------

class SchemaError(HuntError):
    """Document is malformed or violates the file schema."""


class DanglingRef(HuntError):
    """An element references an id that does not exist."""


class DisconnectedGraph(HuntError):
    """The navigation graph is not connected with no obstacles applied."""


class DuplicateId(HuntError):
    """Two elements share an id that must be unique building-wide."""


class UnknownNode(HuntError):
    pass


class UnknownEdge(HuntError):
    pass


class UnknownFloor(HuntError):
    pass


class UnknownEquipment(HuntError):
    pass


class UnknownRoom(HuntError):
    pass


# -- scenario -------------------------------------------------------------

class EmptyZone(HuntError):
    """Zone radius is not positive or the circle touches no room."""


class UnreachableObjective(HuntError):
    """The objective cannot be reached from every start-room node."""


# -- session --------------------------------------------------------------

class ScenarioBuildingMismatch(HuntError):
    pass


class DuplicateClient(HuntError):
    pass


class SecondTrainer(HuntError):
    pass


class UnknownTeam(HuntError):
    pass


class UnknownClient(HuntError):
    pass


class IncompleteTeam(HuntError):
    """A team does not have exactly one radio and 2 or 3 hunters."""


class NoTrainer(HuntError):
    pass


class WrongPhase(HuntError):
    pass


class NotAdjacent(HuntError):
    pass


class EdgeBlocked(HuntError):
    pass


class NotTeamRadio(HuntError):
    pass


class NotTrainer(HuntError):
    pass


# -- protocol -------------------------------------------------------------

class DecodeError(HuntError):
    """Frame could not be decoded; ``detail`` carries the offending tag."""


class OversizeFrame(HuntError):
    """Encoded frame exceeds the 64 KiB limit."""


class VersionMismatch(HuntError):
    pass


class JoinRejected(HuntError):
    """Handshake failed; wraps a session-level join error."""

    def __init__(self, cause: HuntError):
        super().__init__(f"{type(cause).__name__}: {cause.detail}")
        self.cause = cause


# -- recording / replay ----------------------------------------------------

class OutOfOrder(HuntError):
    pass


class SinkError(HuntError):
    pass


class DigestMismatch(HuntError):
    pass


class CorruptLog(HuntError):
    pass


class RangeError(HuntError):
    pass


class Timeout(HuntError):
    """Simulation did not finish within its tick budget."""
