"""Exception hierarchy shared by every module.

Each error carries a short machine-readable ``code`` so the command line
front end can map failures onto exit codes without string matching.
"""


class EffMealyError(Exception):
    code = "Error"


class InputError(EffMealyError):
    """Malformed or inconsistent input data (exit code 3 at the CLI)."""


class DomainMismatch(InputError):
    code = "DomainMismatch"


class TheoryMismatch(InputError):
    code = "TheoryMismatch"


class NotAProduct(InputError):
    code = "NotAProduct"


class ShapeMismatch(InputError):
    code = "ShapeMismatch"


class EmptySupport(InputError):
    code = "EmptySupport"


class InvalidMorph(InputError):
    code = "InvalidMorph"


class DoSyntaxError(InputError):
    code = "SyntaxError"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(message + where)


class DuplicateName(InputError):
    code = "DuplicateName"


class UnknownGenerator(InputError):
    code = "UnknownGenerator"


class UnboundVariable(InputError):
    code = "UnboundVariable"


class ArityMismatch(InputError):
    code = "ArityMismatch"


class TypeMismatch(InputError):
    code = "TypeMismatch"


class RebindError(InputError):
    code = "RebindError"


class SignatureMismatch(InputError):
    code = "SignatureMismatch"


class MissingInterpretation(InputError):
    code = "MissingInterpretation"


class PurityViolation(InputError):
    code = "PurityViolation"


class SizeLimitExceeded(InputError):
    code = "SizeLimitExceeded"


class NotCausal(InputError):
    code = "NotCausal"


class ConfigInvalid(InputError):
    code = "ConfigInvalid"
