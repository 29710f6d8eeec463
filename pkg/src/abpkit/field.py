"""Prime-field scalars.

Scalars are plain Python ints kept in ``[0, p)``.  The modulus is held in a
context variable so a whole computation can be re-run under another prime::

    with use_prime(1_000_000_007):
        ...

Objects built under one prime must not be mixed with another.
"""

from __future__ import annotations

import contextlib
import contextvars
import os
from typing import Iterator

DEFAULT_PRIME = 2**61 - 1
MIN_PRIME = 10**9

_prime: contextvars.ContextVar[int] = contextvars.ContextVar("abpkit_prime")


def _check_prime(p: int) -> int:
    p = int(p)
    if p <= MIN_PRIME:
        raise ValueError(f"modulus {p} must exceed {MIN_PRIME}")
    from sympy import isprime

    if not isprime(p):
        raise ValueError(f"modulus {p} is not prime")
    return p


def _initial_prime() -> int:
    env = os.environ.get("ABPKIT_PRIME")
    return _check_prime(int(env)) if env else DEFAULT_PRIME


def get_prime() -> int:
    try:
        return _prime.get()
    except LookupError:
        p = _initial_prime()
        _prime.set(p)
        return p


@contextlib.contextmanager
def use_prime(p: int) -> Iterator[int]:
    token = _prime.set(_check_prime(p))
    try:
        yield p
    finally:
        _prime.reset(token)


def reduce(a: int) -> int:
    return a % get_prime()


def inv(a: int) -> int:
    p = get_prime()
    a %= p
    if a == 0:
        raise ZeroDivisionError("0 has no inverse mod p")
    return pow(a, p - 2, p)


def signed(a: int) -> int:
    """Representative of ``a`` in ``(-p/2, p/2]``, used for display and JSON."""
    p = get_prime()
    a %= p
    return a - p if a > p // 2 else a
