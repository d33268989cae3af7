"""Error taxonomy shared by the whole package.

Every failure mode that callers are expected to handle gets its own class;
the CLI maps them onto the exit-code contract (see cli.EXIT_CODES).
"""


class LevelTowerError(Exception):
    """Base class for all package errors."""


class PreconditionError(LevelTowerError):
    """An operation's stated precondition is violated (CLI exit 2)."""


class CertificationError(PreconditionError):
    """A required regular-elliptic (or separability) certificate is absent."""


class Inconclusive(CertificationError):
    """The certifier could not establish irreducibility; input is rejected."""


class CapExceeded(LevelTowerError):
    """A configured desk-scale cap (rank, group order, conductor, q) was hit (CLI exit 3)."""


class RankCapExceeded(CapExceeded):
    """Ring rank would exceed the configured cap."""


class OracleMismatch(LevelTowerError):
    """Two independent computation routes disagree (CLI exit 4)."""


class NonExactDivision(LevelTowerError):
    """Polynomial division left a nonzero remainder where exactness was required."""

    def __init__(self, msg, remainder=None):
        super().__init__(msg)
        self.remainder = remainder


class NonLinearIsogeny(LevelTowerError):
    """A subgroup product polynomial failed the additivity (q-power support) check."""


class NoNormalForm(LevelTowerError):
    """A quotient module law could not be put in the standard polynomial shape."""


class NotAFlag(LevelTowerError):
    """The greedy chain construction produced a non-subgroup or non-free step."""


class PrecisionError(LevelTowerError):
    """Finite-precision arithmetic cannot decide the requested question."""
