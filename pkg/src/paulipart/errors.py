"""Exception hierarchy shared by all modules."""


class PauliPartError(Exception):
    """Base class for every error raised by this package."""


class ParseError(PauliPartError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvalidCharacter(ParseError):
    def __init__(self, position, char):
        self.position = position
        self.char = char
        super().__init__(f"invalid Pauli letter {char!r} at position {position}")


class EmptyString(ParseError):
    def __init__(self):
        super().__init__("empty Pauli string")


class LengthMismatch(PauliPartError, ValueError):
    pass


class NonHermitianProduct(PauliPartError, ArithmeticError):
    pass


class TooLarge(PauliPartError):
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"instance of size {size} exceeds limit {limit}")


class NotCommuting(PauliPartError):
    def __init__(self, a, b):
        self.pair = (a, b)
        super().__init__(f"{a} and {b} do not commute")


class IndexOutOfRange(PauliPartError, ValueError):
    pass


class UnsupportedIndexPattern(PauliPartError, ValueError):
    pass


class RankDeficiency(PauliPartError):
    pass


class NotDiagonalized(PauliPartError):
    def __init__(self, pauli):
        self.pauli = pauli
        super().__init__(f"conjugated observable {pauli} is not diagonal")


class QubitCountMismatch(PauliPartError, ValueError):
    pass


class TooManyQubits(PauliPartError, ValueError):
    pass


class InsufficientShots(PauliPartError, ValueError):
    pass


class NonPositiveEpsilon(PauliPartError, ValueError):
    pass


class NotARefinement(PauliPartError, ValueError):
    pass


class EmptyFamily(PauliPartError, ValueError):
    pass
