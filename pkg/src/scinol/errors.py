"""Exception hierarchy shared by every scinol module."""


class ScinolError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ScinolError, ValueError):
    pass


class NonFiniteError(ScinolError, ValueError):
    pass


class LabelMismatchError(ScinolError, TypeError):
    """Label or prediction variant does not fit the loss."""


class LipschitzError(ScinolError, ValueError):
    """A subgradient outside [-1, 1] was fed back to a learner."""


class ProtocolError(ScinolError, RuntimeError):
    """begin_trial / feedback called out of order."""


class ConfigError(ScinolError, ValueError):
    pass


class HistoryMismatchError(ScinolError, ValueError):
    """A recorded history does not match a replay of the named learner."""


class ParseError(ScinolError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        prefix = ", ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class DomainError(ScinolError, ValueError):
    """Argument outside the domain where a lemma or formula is stated."""


class UndefinedFeatureError(ScinolError, ValueError):
    """A comparator puts weight on a feature that was never nonzero."""
