"""A computational laboratory for minimal denominators and lattice cone minima.

The package has three layers: exact rational search routines
(``mindenom.rational``), lattice geometry with flows and cone
minimization (``mindenom.lattice``, ``mindenom.haar``), and square-tiled
surfaces (``mindenom.surfaces``).  Monte-Carlo experiments tying the
layers together live in ``mindenom.experiments``; the ``lab`` console
script drives them.
"""

from mindenom._backend import BACKEND
from mindenom.errors import CapExceededError

__version__ = "0.1.0"

from mindenom.rational import (  # noqa: E402
    FractionHit,
    OpenInterval,
    q_m,
    q_mn,
    qmin,
    qmin_bruteforce,
    simplest_in_interval,
)
from mindenom.lattice import (  # noqa: E402
    ConeHit,
    ConeSpec,
    LatticeBasis,
    f_cone,
    f_cone_exact,
    geodesic_2,
    geodesic_mn,
    horocycle_2,
    horocycle_mn,
)
from mindenom.haar import HaarSample, sample_x2, siegel_mean_count  # noqa: E402
from mindenom.stats import (  # noqa: E402
    ChenHaynesEstimate,
    EmpiricalCDF,
    ks_distance,
    layer_cake_mean,
    mean_estimate,
)
from mindenom.surfaces import (  # noqa: E402
    HolonomySet,
    Origami,
    enumerate_holonomies,
    minimal_veech_alpha,
    parse_origami,
    primitive_vectors,
    psi,
    sl2z_act_origami,
)

__all__ = [
    "BACKEND",
    "CapExceededError",
    "__version__",
    "FractionHit",
    "OpenInterval",
    "simplest_in_interval",
    "qmin",
    "qmin_bruteforce",
    "q_m",
    "q_mn",
    "LatticeBasis",
    "ConeSpec",
    "ConeHit",
    "geodesic_2",
    "horocycle_2",
    "geodesic_mn",
    "horocycle_mn",
    "f_cone",
    "f_cone_exact",
    "HaarSample",
    "sample_x2",
    "siegel_mean_count",
    "EmpiricalCDF",
    "ks_distance",
    "mean_estimate",
    "layer_cake_mean",
    "ChenHaynesEstimate",
    "Origami",
    "parse_origami",
    "HolonomySet",
    "enumerate_holonomies",
    "primitive_vectors",
    "psi",
    "sl2z_act_origami",
    "minimal_veech_alpha",
]
