"""Binary-addition-tree enumeration and exact network reliability.

All 2^N_var arc-state vectors are visited in binary-counter order (coordinate
1 is the least significant bit), the connected ones are kept once per
topology, and reliability for any per-arc probability vector is the summed
probability of the stored vectors.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .network import Network, is_connected

DEFAULT_CAP = 30
CACHE_VERSION = 1
_CHUNK = 1 << 18


class EnumerationCapError(RuntimeError):
    """Refused to enumerate 2^N_var vectors above the configured arc cap."""


def next_vector(x):
    """Binary-addition successor of a state vector, or None when exhausted.

    Scans from coordinate 1: leading 1s carry to 0, the first 0 flips to 1.
    (1,1,...,1) has no successor.
    """
    out = list(x)
    for i, bit in enumerate(out):
        if bit:
            out[i] = 0
        else:
            out[i] = 1
            return tuple(out)
    return None


def network_key(net: Network) -> str:
    """Content hash identifying a topology (arcs, endpoints, direction mode)."""
    desc = f"{net.node_count};{net.source};{net.sink};{int(net.directed)};" + \
        ",".join(f"{u}-{v}" for u, v in net.arcs)
    return hashlib.sha256(desc.encode()).hexdigest()


@dataclass(frozen=True)
class ConnectedVectorSet:
    """All connected arc-state vectors of one topology, in BAT order.

    ``states`` holds each vector packed into one integer (bit i-1 = x_i).
    Immutable; share freely across concurrent evaluators.
    """

    n_arcs: int
    key: str
    states: np.ndarray  # uint64, sorted ascending = BAT visitation order

    def __len__(self):
        return len(self.states)

    def vectors(self):
        """Stored vectors as 0/1 tuples, in enumeration order."""
        return [tuple((int(s) >> i) & 1 for i in range(self.n_arcs))
                for s in self.states]

    def bits(self) -> np.ndarray:
        """Stored vectors as a boolean (n_stored, n_arcs) matrix."""
        shifts = np.arange(self.n_arcs, dtype=np.uint64)
        return ((self.states[:, None] >> shifts) & 1).astype(bool)


def connected_states(net: Network, states: np.ndarray) -> np.ndarray:
    """Vectorized connectivity for packed arc-state integers.

    Keeps a reachable-node bitmask per state and sweeps the arc list until a
    fixpoint; needs node ids <= 64 (falls back to per-vector search beyond).
    """
    states = np.asarray(states, dtype=np.uint64)
    if net.node_count > 64:
        return np.array(
            [is_connected(net, [(int(s) >> i) & 1 for i in range(net.n_arcs)])
             for s in states], dtype=bool)
    one = np.uint64(1)
    reach = np.full(states.shape, one << np.uint64(net.source - 1), dtype=np.uint64)
    for _ in range(net.node_count):
        prev = reach.copy()
        for i, (u, v) in enumerate(net.arcs):
            up = (states >> np.uint64(i)) & one
            at_u = (reach >> np.uint64(u - 1)) & one
            reach |= (up & at_u) << np.uint64(v - 1)
            if not net.directed:
                at_v = (reach >> np.uint64(v - 1)) & one
                reach |= (up & at_v) << np.uint64(u - 1)
        if np.array_equal(reach, prev):
            break
    return ((reach >> np.uint64(net.sink - 1)) & one).astype(bool)


def enumerate_connected(net: Network, cap: int = DEFAULT_CAP) -> ConnectedVectorSet:
    """Visit all 2^N_var vectors from zero and keep the connected ones.

    Refuses networks above ``cap`` arcs: the sweep is Theta(2^N_var) and
    would otherwise run unannounced for hours.
    """
    n = net.n_arcs
    if n > cap:
        raise EnumerationCapError(
            f"network has {n} arcs; enumerating 2^{n} vectors exceeds the cap "
            f"of {cap} (raise the cap explicitly to proceed)")
    total = 1 << n
    kept = []
    for start in range(0, total, _CHUNK):
        chunk = np.arange(start, min(start + _CHUNK, total), dtype=np.uint64)
        kept.append(chunk[connected_states(net, chunk)])
    states = np.concatenate(kept) if kept else np.empty(0, dtype=np.uint64)
    return ConnectedVectorSet(n_arcs=n, key=network_key(net), states=states)


def reliability(cvs: ConnectedVectorSet, p) -> float:
    """Exact reliability: sum over stored vectors X of prod_i q_i,
    q_i = p_i if x_i = 1 else 1 - p_i.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (cvs.n_arcs,):
        raise ValueError(f"expected {cvs.n_arcs} probabilities, got {p.shape}")
    if np.any((p < 0.0) | (p > 1.0)):
        raise ValueError("probabilities must lie in [0, 1]")
    if len(cvs) == 0:
        return 0.0
    total = float(np.where(cvs.bits(), p, 1.0 - p).prod(axis=1).sum())
    # clamp ulp-scale round-off only; anything larger is a real bug upstream
    if 1.0 < total <= 1.0 + 1e-12:
        total = 1.0
    return total


def multilinear_terms(cvs: ConnectedVectorSet):
    """Reliability as a sparse multilinear polynomial in the arc probabilities.

    Returns [(coeff, arc_index_tuple), ...] with
    reliability(p) = sum coeff * prod_{i in tuple} p[i].  The Moebius
    transform of the connected-set indicator; used as the solver's fast
    evaluation path and cross-checked against reliability() in tests.
    """
    n = cvs.n_arcs
    c = np.zeros(1 << n)
    c[np.asarray(cvs.states, dtype=np.int64)] = 1.0
    for i in range(n):
        bit = 1 << i
        hi = (np.arange(1 << n) & bit).astype(bool)
        c[hi] -= c[~hi]
    return [(float(c[t]), tuple(i for i in range(n) if (t >> i) & 1))
            for t in range(1 << n) if c[t] != 0.0]


def save_cvs(cvs: ConnectedVectorSet, path) -> None:
    """Write a versioned cache file for one topology's connected vectors."""
    np.savez(path, version=CACHE_VERSION, key=cvs.key,
             n_arcs=cvs.n_arcs, states=cvs.states)


def load_cvs(path, net: Network | None = None) -> ConnectedVectorSet:
    """Load a cache file, optionally validating it against a network."""
    with np.load(path, allow_pickle=False) as data:
        if int(data["version"]) != CACHE_VERSION:
            raise ValueError(f"unsupported cache version {int(data['version'])}")
        cvs = ConnectedVectorSet(
            n_arcs=int(data["n_arcs"]), key=str(data["key"]),
            states=data["states"].astype(np.uint64))
    if net is not None and cvs.key != network_key(net):
        raise ValueError("cache file does not match this network")
    return cvs
