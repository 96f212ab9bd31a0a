"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid input data: bad dimensions, out-of-range indices, broken invariants."""


class SingularExchangeError(ValueError):
    """A pair momentum collides with the spectrum of the coupling matrix.

    Raised when 2i*k_pair lies within tolerance of an eigenvalue of the
    coupling, which makes the exchange-operator resolvent singular.
    """

    def __init__(self, message, collision=None):
        super().__init__(message)
        self.collision = collision


class PropagationError(RuntimeError):
    """Coefficient propagation revisited a momentum ordering with a different vector.

    Signals that the two-body exchange relations do not close for this
    coupling, so the multi-particle ansatz is path dependent.
    """

    def __init__(self, message, permutation_pair=None, discrepancy=None):
        super().__init__(message)
        self.permutation_pair = permutation_pair
        self.discrepancy = discrepancy


class HyperplaneError(ValueError):
    """A sample point lies on (or off) a coincidence hyperplane unexpectedly."""


class ModelFileError(ValueError):
    """Parse error in a model or boundary-condition file, with location info."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc = f" ({loc})"
        super().__init__(message + loc)
        self.line = line
        self.column = column
