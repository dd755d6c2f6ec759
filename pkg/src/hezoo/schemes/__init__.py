"""Scheme implementations; importing this package registers every adapter."""

from . import armknecht, bfv, bogdanovlee, challagunta, ckks, intpoly, mvideal, rankideal  # noqa: F401
