"""Counter-based random streams.

Layout: a run is identified by a 64-bit seed; sample ``i`` of the run
owns the Philox4x64-10 stream with key ``(seed, i)``.  Within a stream,
block counters 0, 1, 2, ... yield four 64-bit words each, consumed in
order.  Uniform doubles take the top 53 bits: ``(word >> 11) * 2**-53``.

Because streams never share state, results are independent of evaluation
order and of how samples are split across workers.
"""

from mindenom._backend import kernel

ALGORITHM = "philox4x64-10"

_INV53 = 2.0 ** -53


class Stream:
    """Word/uniform cursor over the stream keyed (seed, index)."""

    __slots__ = ("seed", "index", "_block", "_buf", "_pos")

    def __init__(self, seed, index=0):
        self.seed = seed & 0xFFFFFFFFFFFFFFFF
        self.index = index & 0xFFFFFFFFFFFFFFFF
        self._block = 0
        self._buf = None
        self._pos = 4

    def next_u64(self):
        if self._pos == 4:
            self._buf = kernel.philox4_block(self.seed, self.index, self._block)
            self._block += 1
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def uniform(self):
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV53

    def uniform_open(self):
        """Uniform double in (0, 1]."""
        return ((self.next_u64() >> 11) + 1) * _INV53

    def randint(self, lo, hi):
        """Uniform integer in [lo, hi] by rejection on 64-bit words."""
        if hi < lo:
            raise ValueError("empty range")
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            w = self.next_u64()
            if w < limit:
                return lo + w % span
