"""Deterministic stream derivation.

Every random stream in a run is a counter-based Philox generator whose
128-bit key is a splitmix64 avalanche over (run seed, stream tag, ...),
so streams are independent, cheap to construct, and reproducible on any
platform. The same splitmix64 core also backs `mix64`, the documented
hash that turns (master seed, problem, rate, run index) into run seeds.
"""

import numpy as np

__all__ = ["splitmix64", "mix64", "substream"]

_MASK64 = (1 << 64) - 1
_INIT = 0x243F6A8885A308D3  # pi fraction, arbitrary non-zero start


def splitmix64(z):
    """One splitmix64 avalanche round over a 64-bit value."""
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts):
    """64-bit hash of a mixed int/str tuple.

    Strings and ints are length-prefixed before absorption so distinct
    tuples cannot collide by concatenation; every 8-byte chunk passes
    through a splitmix64 round.
    """
    h = _INIT
    for part in parts:
        if isinstance(part, str):
            data = part.encode("utf-8")
        elif isinstance(part, (int, np.integer)):
            data = int(part & _MASK64).to_bytes(8, "little")
        else:
            raise TypeError(f"cannot mix part of type {type(part).__name__}")
        h = splitmix64(h ^ len(data))
        if len(data) % 8:
            data += b"\x00" * (8 - len(data) % 8)
        for i in range(0, len(data), 8):
            h = splitmix64(h ^ int.from_bytes(data[i : i + 8], "little"))
    return h


def substream(run_seed, *path):
    """Independent generator for the named substream (run_seed, *path)."""
    h = splitmix64(_INIT ^ (run_seed & _MASK64))
    for part in path:
        h = splitmix64(h ^ (int(part) & _MASK64))
    key = np.array([splitmix64(h), splitmix64(h ^ _MASK64)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
