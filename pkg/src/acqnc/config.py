"""Tolerance defaults. The CLI's ``--tol`` overrides ``LOGICAL``."""

LOGICAL = 1e-9
STRUCTURAL = 1e-12

MAX_QUBITS = 20
MAX_TRACE_QUBITS = 12


def logical(tol: float | None = None) -> float:
    return LOGICAL if tol is None else tol


def structural(tol: float | None = None) -> float:
    return STRUCTURAL if tol is None else tol


class GuardError(ValueError):
    """A size guard was exceeded; the message names the guard and its limit."""


_guards = {"enabled": True}


def guards_enabled() -> bool:
    return _guards["enabled"]


def set_guards(enabled: bool) -> None:
    _guards["enabled"] = bool(enabled)


def check_guard(name: str, value: int, limit: int) -> None:
    if _guards["enabled"] and value > limit:
        raise GuardError(f"guard {name}={limit} exceeded ({value})")
