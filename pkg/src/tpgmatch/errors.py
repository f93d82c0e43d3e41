"""Exception hierarchy shared by every stage of the matcher."""


class TPGMatchError(Exception):
    """Base class. ``stage`` is filled in by :func:`tpgmatch.matcher.match`."""

    stage = None

    def __str__(self):
        msg = super().__str__()
        return f"[{self.stage}] {msg}" if self.stage else msg


class GraphError(TPGMatchError, ValueError):
    pass


class AffinityError(TPGMatchError, ValueError):
    pass


class SizeCapError(TPGMatchError):
    """Product graph would exceed ``max_tpg_nodes``."""


class SolverError(TPGMatchError, ArithmeticError):
    """A linear solve or LP did not produce a usable answer."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class ConfigError(TPGMatchError, ValueError):
    pass
