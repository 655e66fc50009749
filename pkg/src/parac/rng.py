"""Counter-based random stream.

Every draw is a pure function of ``(seed, vertex, counter)``, so the
sequence a vertex sees does not depend on which thread eliminates it or when.
"""

_MASK = (1 << 64) - 1
_INV53 = 2.0 ** -53


def _splitmix(z):
    z = (z + 0x9E3779B97F4A7C15) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def draw(seed, vertex, counter):
    """Uniform double in ``[0, 1)`` for the given stream coordinates."""
    h = _splitmix(_splitmix(_splitmix(seed & _MASK) ^ vertex) ^ counter)
    return (h >> 11) * _INV53


class SampleStream:
    """Per-vertex stream with an advancing draw counter."""

    __slots__ = ("seed", "vertex", "counter")

    def __init__(self, seed, vertex=0, counter=0):
        self.seed = int(seed)
        self.vertex = int(vertex)
        self.counter = int(counter)

    def for_vertex(self, vertex):
        return SampleStream(self.seed, vertex)

    def draw(self):
        u = draw(self.seed, self.vertex, self.counter)
        self.counter += 1
        return u

    def __repr__(self):
        return (f"SampleStream(seed={self.seed}, vertex={self.vertex}, "
                f"counter={self.counter})")
