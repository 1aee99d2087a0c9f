"""Shared error taxonomy.

Every failure raised by this package is one of the two classes below, so the
CLI can map them onto stable exit codes (input errors -> 2, numerical
errors -> 3) without inspecting messages.
"""


class InputError(ValueError):
    """Bad user input: domain violations, malformed specs, size-guard trips,
    precondition failures, unsupported spec families."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a trustworthy answer: bracket not
    found, iteration cap hit, non-finite intermediate."""
