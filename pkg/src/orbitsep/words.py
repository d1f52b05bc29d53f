"""Reduced words over signed letters.

A word is a tuple of nonzero ints: ``+i`` is letter ``i``, ``-i`` its formal
inverse, and the empty tuple is the identity.  All functions keep words
reduced (no adjacent ``+i, -i`` pair).
"""

from .errors import InvalidInputError

IDENTITY = ()


def reduce_word(letters):
    """Reduce an arbitrary letter sequence to a reduced word."""
    out = []
    for s in letters:
        if not isinstance(s, int) or isinstance(s, bool) or s == 0:
            raise InvalidInputError(f"bad word letter {s!r}")
        if out and out[-1] == -s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


def compose(u, v):
    """Concatenate two reduced words, cancelling at the seam."""
    i = len(u)
    j = 0
    while i > 0 and j < len(v) and u[i - 1] == -v[j]:
        i -= 1
        j += 1
    return u[:i] + v[j:]


def invert(w):
    """Reverse and negate a reduced word."""
    return tuple(-s for s in reversed(w))


def is_reduced(w):
    return all(w[k] != -w[k + 1] for k in range(len(w) - 1))
