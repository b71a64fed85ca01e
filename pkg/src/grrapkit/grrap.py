"""GRRAP instances: per-arc constants, constraints, penalty, affixed encoding.

Each arc of the network is a subsystem with an integer redundancy n_i in
[n_min, n_max] and a component reliability r_i in [r_min, r_max].  A solution
packs both into one float per arc: x_i = n_i + r_i (affixation).  Subsystems
use active parallel redundancy, Pr(arc up) = 1 - (1 - r_i)^{n_i}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import bat
from .network import Network, NetworkParseError

# Benchmark per-subsystem constants and resource bounds (alpha already
# resolved, i.e. the tabulated value times 1e-5).
BASE_PARAMS = (
    (2.330e-5, 1.5, 1.0, 7.0),
    (1.450e-5, 1.5, 2.0, 8.0),
    (0.541e-5, 1.5, 3.0, 8.0),
    (8.050e-5, 1.5, 4.0, 6.0),
    (1.950e-5, 1.5, 2.0, 9.0),
)
BASE_BOUNDS = (110.0, 175.0, 200.0)

DEFAULT_R_MIN = 0.5
DEFAULT_R_MAX = 1.0 - 1e-6


@dataclass(frozen=True)
class ArcParams:
    """Constants of one subsystem: cost alpha/beta, volume weight, weight."""

    alpha: float
    beta: float
    wv2: float
    w: float

    def __post_init__(self):
        for name in ("alpha", "beta", "wv2", "w"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ProblemInstance:
    network: Network
    params: tuple[ArcParams, ...]
    v_ub: float
    c_ub: float
    w_ub: float
    n_min: int = 1
    n_max: int = 10
    r_min: float = DEFAULT_R_MIN
    r_max: float = DEFAULT_R_MAX

    def __post_init__(self):
        if len(self.params) != self.network.n_arcs:
            raise ValueError(
                f"{len(self.params)} parameter rows for {self.network.n_arcs} arcs")
        if min(self.v_ub, self.c_ub, self.w_ub) <= 0:
            raise ValueError("resource bounds must be positive")
        if self.n_min > self.n_max:
            raise ValueError("n_min > n_max")
        if not 0.0 < self.r_min < self.r_max < 1.0:
            raise ValueError("need 0 < r_min < r_max < 1")

    @property
    def n_arcs(self) -> int:
        return self.network.n_arcs


@dataclass(frozen=True)
class Evaluation:
    """Outcome of scoring one solution."""

    r_s: float
    r_p: float
    g_v: float
    g_c: float
    g_w: float
    feasible: bool


def encode(inst: ProblemInstance, n, r):
    """Affix redundancies and reliabilities into x_i = n_i + r_i."""
    if len(n) != len(r) or len(n) != inst.n_arcs:
        raise ValueError("length mismatch")
    for ni, ri in zip(n, r):
        if not inst.n_min <= ni <= inst.n_max:
            raise ValueError(f"redundancy {ni} outside [{inst.n_min}, {inst.n_max}]")
        if not inst.r_min <= ri <= inst.r_max:
            raise ValueError(f"reliability {ri} outside [{inst.r_min}, {inst.r_max}]")
    return tuple(ni + ri for ni, ri in zip(n, r))


def decode(inst: ProblemInstance, x):
    """Split affixed coordinates into (n, r), clamping both into range.

    This is the single repair point: swarm updates may produce arbitrary
    floats and every out-of-range part is clamped here, never rejected.
    A zero fractional part clamps up to r_min.
    """
    n = []
    r = []
    for xi in x:
        ni = math.floor(xi)
        ri = xi - ni
        ni = min(max(ni, inst.n_min), inst.n_max)
        ri = min(max(ri, inst.r_min), inst.r_max)
        n.append(ni)
        r.append(ri)
    return tuple(n), tuple(r)


def g_volume(inst: ProblemInstance, n) -> float:
    """Volume usage: sum_i wv2_i * n_i^2."""
    return sum(p.wv2 * ni * ni for p, ni in zip(inst.params, n))


def g_cost(inst: ProblemInstance, n, r) -> float:
    """Cost usage: sum_i alpha_i * (-1000/ln r_i)^beta_i * (n_i + e^{n_i/4}).

    Requires every r_i strictly inside (0, 1).
    """
    total = 0.0
    for p, ni, ri in zip(inst.params, n, r):
        if not 0.0 < ri < 1.0:
            raise ValueError(f"reliability {ri} outside (0, 1); cost undefined")
        total += p.alpha * (-1000.0 / math.log(ri)) ** p.beta * (ni + math.exp(ni / 4.0))
    return total


def g_weight(inst: ProblemInstance, n) -> float:
    """Weight usage: sum_i w_i * n_i * e^{n_i/4}."""
    return sum(p.w * ni * math.exp(ni / 4.0) for p, ni in zip(inst.params, n))


def subsystem_reliability(n_i: int, r_i: float) -> float:
    """Probability an arc is up with n_i active-parallel components: 1-(1-r)^n."""
    return 1.0 - (1.0 - r_i) ** n_i


def penalty_factor(inst: ProblemInstance, g_v: float, g_c: float, g_w: float) -> float:
    """Cubed worst constraint-usage ratio, 1 when feasible."""
    return min(inst.v_ub / g_v, inst.c_ub / g_c, inst.w_ub / g_w, 1.0) ** 3


def penalized_reliability(inst: ProblemInstance, cvs: bat.ConnectedVectorSet, x) -> Evaluation:
    """Score a solution: exact reliability times the penalty factor."""
    n, r = decode(inst, x)
    g_v = g_volume(inst, n)
    g_c = g_cost(inst, n, r)
    g_w = g_weight(inst, n)
    p = [subsystem_reliability(ni, ri) for ni, ri in zip(n, r)]
    r_s = bat.reliability(cvs, p)
    feasible = g_v <= inst.v_ub and g_c <= inst.c_ub and g_w <= inst.w_ub
    r_p = r_s if feasible else r_s * penalty_factor(inst, g_v, g_c, g_w)
    return Evaluation(r_s=r_s, r_p=r_p, g_v=g_v, g_c=g_c, g_w=g_w, feasible=feasible)


def synthesize_instance(net: Network, base_params=BASE_PARAMS, base_bounds=BASE_BOUNDS,
                        r_min: float = DEFAULT_R_MIN,
                        r_max: float = DEFAULT_R_MAX) -> ProblemInstance:
    """Build an instance for any topology from the 5-row benchmark data.

    Arc i copies the constants of base row (i mod 5), with remainder 0
    mapping to row 5; bounds scale as N_var * bound / 5.
    """
    rows = len(base_params)
    params = []
    for i in range(1, net.n_arcs + 1):
        iota = i % rows
        if iota == 0:
            iota = rows
        params.append(ArcParams(*base_params[iota - 1]))
    scale = net.n_arcs / rows
    v_ub, c_ub, w_ub = (b * scale for b in base_bounds)
    return ProblemInstance(network=net, params=tuple(params),
                           v_ub=v_ub, c_ub=c_ub, w_ub=w_ub,
                           r_min=r_min, r_max=r_max)


def format_instance(inst: ProblemInstance) -> str:
    """Serialize an instance to the line-oriented instance file format."""
    lines = []
    for i, p in enumerate(inst.params, start=1):
        lines.append(f"param {i} {p.alpha:.12g} {p.beta:.12g} {p.wv2:.12g} {p.w:.12g}")
    lines.append(f"bounds {inst.v_ub:.12g} {inst.c_ub:.12g} {inst.w_ub:.12g}")
    lines.append(f"rrange {inst.r_min:.12g} {inst.r_max:.12g}")
    return "\n".join(lines) + "\n"


def parse_instance(text: str, net: Network) -> ProblemInstance:
    """Parse the instance file format against a known network."""
    params = {}
    bounds = None
    rrange = (DEFAULT_R_MIN, DEFAULT_R_MAX)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0].lower()
        try:
            if kind == "param":
                idx = int(fields[1])
                if idx in params:
                    raise NetworkParseError(f"duplicate param id {idx}", lineno)
                params[idx] = ArcParams(*(float(v) for v in fields[2:6]))
            elif kind == "bounds":
                bounds = tuple(float(v) for v in fields[1:4])
            elif kind == "rrange":
                rrange = (float(fields[1]), float(fields[2]))
            else:
                raise NetworkParseError(f"unknown directive {kind!r}", lineno)
        except NetworkParseError:
            raise
        except (IndexError, ValueError) as exc:
            raise NetworkParseError(f"malformed {kind!r} line: {exc}", lineno)
    if bounds is None or len(bounds) != 3:
        raise NetworkParseError("missing or malformed bounds line")
    if set(params) != set(range(1, net.n_arcs + 1)):
        raise NetworkParseError(
            f"param ids must cover 1..{net.n_arcs} exactly once")
    return ProblemInstance(network=net,
                           params=tuple(params[i] for i in range(1, net.n_arcs + 1)),
                           v_ub=bounds[0], c_ub=bounds[1], w_ub=bounds[2],
                           r_min=rrange[0], r_max=rrange[1])
