"""Shared error taxonomy.

PrecisionExhausted: the working precision or oracle accuracy cannot
certify the requested output (callers typically double precision and
retry).  BudgetExhausted: an enumeration or subdivision exceeded its step
budget; the computation is resumable or must be re-run with more budget.
CertificateInconsistent: non-uniform input data failed its validity
check.  The rest are domain-specific contract violations.
"""


class PrecisionExhausted(Exception):
    pass


class BudgetExhausted(Exception):
    pass


class CertificateInconsistent(Exception):
    pass


class RationalInput(Exception):
    """A continued-fraction expansion terminated: the input is rational."""


class TailUnbounded(Exception):
    """A Brjuno-sum tail cannot be certified from the available data."""


class DegenerateCoefficient(Exception):
    """A leading Taylor coefficient vanished where theory forbids it."""
