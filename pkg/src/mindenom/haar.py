"""Sampling unimodular 2d lattices uniformly (Haar measure on SL2(R)/SL2(Z)).

The shape point x + iy is drawn from the hyperbolic-area measure dx dy / y^2
on the classical fundamental domain |x| <= 1/2, x^2 + y^2 >= 1 by rejection
from the strip y >= sqrt(3)/2 (acceptance probability pi*sqrt(3)/6), then a
uniform rotation is applied.  ``sample_x2`` repeats, step for step, the
arithmetic of the batch kernels so that a sample drawn here equals the
kernel's sample for the same (seed, index) bit for bit.
"""

import math
from dataclasses import dataclass

from mindenom import _backend
from mindenom._pykernel import _TWO_PI, _Y_FLOOR
from mindenom.lattice import LatticeBasis
from mindenom.rng import Stream

__all__ = ["HaarSample", "sample_x2", "siegel_mean_count"]


@dataclass(frozen=True)
class HaarSample:
    """Fundamental-domain draw: shape point, rotation, basis (row-major)."""

    x: float
    y: float
    theta: float
    basis: tuple  # ((b00, b01), (b10, b11)), columns generate the lattice

    @property
    def lattice(self):
        return LatticeBasis(((self.basis[0][0], self.basis[1][0]), (self.basis[0][1], self.basis[1][1])))


def sample_x2(stream):
    """One Haar draw from a Stream; consumes 2 uniforms per proposal + 1."""
    if not isinstance(stream, Stream):
        raise TypeError("sample_x2 needs a Stream")
    while True:
        x = stream.uniform() - 0.5
        u = 1.0 - stream.uniform()  # in (0, 1]
        y = _Y_FLOOR / u
        if x * x + y * y >= 1.0:
            break
    theta = _TWO_PI * stream.uniform()
    c = math.cos(theta)
    s = math.sin(theta)
    sy = math.sqrt(y)
    b00 = c / sy
    b01 = (c * x) / sy - s * sy
    b10 = s / sy
    b11 = (s * x) / sy + c * sy
    return HaarSample(x=x, y=y, theta=theta, basis=((b00, b01), (b10, b11)))


def siegel_mean_count(seed, region, n_samples, start=0):
    """Mean number of nonzero lattice points in an axis box over Haar draws.

    region = (x0, x1, y0, y1).  The mean converges to the box area.
    """
    x0, x1, y0, y1 = (float(v) for v in region)
    if not (x0 < x1 and y0 < y1):
        raise ValueError("degenerate region")
    counts = _backend.kernel.box_count_batch(int(seed), int(start), int(n_samples), x0, x1, y0, y1)
    return float(counts.mean())
