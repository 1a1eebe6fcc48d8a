"""Exception hierarchy shared by every holoq module."""


class HoloqError(Exception):
    """Base class for all holoq errors."""


class ParseError(HoloqError):
    """Raised when sentence text does not match the grammar."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = message
        if self.expected:
            detail += " (expected one of: " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(f"{detail} at byte offset {offset}")


class UnknownOperator(ParseError):
    pass


class InvalidQumix(HoloqError, ValueError):
    pass


class DimensionError(HoloqError, ValueError):
    pass


class QubitLimitError(HoloqError, ValueError):
    pass


class NonUnitaryError(HoloqError, ValueError):
    pass


class UnresolvedName(HoloqError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unresolved name"


class MissingArity(HoloqError):
    """An epistemic operation has no realization at the requested arity."""


class TableMiss(HoloqError):
    """A table-realized epistemic operation has no entry for its input."""


class NotFactorizable(HoloqError):
    """A table map was asked to act on a block entangled with the rest."""


class ConstraintViolation(HoloqError):
    """A truth-value occurrence does not carry its mandatory projector."""

    def __init__(self, path, sentence, defect):
        self.path = path
        self.sentence = sentence
        self.defect = defect
        super().__init__(
            f"occurrence {sentence} at level {path[0]}, position {path[1]} "
            f"violates the truth-value constraint (defect {defect:.3e})"
        )


class SamplerExhausted(HoloqError):
    """No sampled model satisfied the antecedent of a consequence claim."""


class PresetError(HoloqError):
    pass


class ModelFileError(HoloqError):
    pass
