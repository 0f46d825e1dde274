"""Exception hierarchy shared by every seqc module."""


class SeqcError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(SeqcError):
    """Syntax error with a source position."""

    def __init__(self, message: str, line: int = 0, column: int = 0,
                 filename: str = "<string>"):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.filename = filename

    def __str__(self) -> str:
        return f"{self.filename}:{self.line}:{self.column}: {self.message}"


class EmptyChoiceError(ParseError):
    """A choice(...) was written with fewer than two alternatives."""


class ArityError(ParseError):
    """A call's argument count matches no declaration of that name."""


class EvalError(SeqcError):
    """Base class for expression/condition evaluation failures.

    The machine engine treats these as rule-guard failures (the rule simply
    does not fire), never as crashes.
    """


class UnboundVariableError(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable '{name}'")
        self.name = name


class UnknownConstantError(EvalError):
    def __init__(self, name: str):
        super().__init__(f"unknown constant '{name}'")
        self.name = name


class TypeMismatchError(EvalError):
    pass


class DivisionByZeroError(EvalError):
    def __init__(self):
        super().__init__("division by zero")


class ConstantCycleError(EvalError):
    def __init__(self, name: str):
        super().__init__(f"constant resolution cycle through '{name}'")
        self.name = name


class InvalidAddressError(SeqcError):
    """An address does not resolve to a node of the declaration tree."""

    def __init__(self, path):
        dotted = ".".join(str(i) for i in path) or "(root)"
        super().__init__(f"invalid address {dotted}")
        self.path = tuple(path)


class DepthExceededError(SeqcError):
    """Procedure unfolding exhausted its depth budget (run-fatal)."""

    def __init__(self, limit: int):
        super().__init__(f"procedure unfolding exceeded depth limit {limit}")
        self.limit = limit


class RunFatalError(SeqcError):
    """A diagnostic that aborts the whole run (e.g. printing an unbound
    variable), as opposed to a rule-guard failure."""
