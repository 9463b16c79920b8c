"""Brute-force full-tensor propagation: the uncompressed reference scheme.

The influence functional F is a dense array of J^L complex values, flat
index = sum_n i_n J^(n-1) (i_1 least significant).  One step contracts the
newest index i_1 against the pair-correlation factors and the step matrix,
then relabels the new index p as the deepest slot.  This exists for
verification at small L; a hard capacity cap keeps it honest.
"""

from dataclasses import dataclass, field

import numpy as np

from .bath import CumulantTable
from .system import SystemSpec, StepMatrix

__all__ = ["FullIF", "CapacityError", "channel_cumulants", "q_factors",
           "propagator_factor", "propagate_full", "readout_full",
           "trace_full"]

# the oracle refuses tensors above this many elements
MAX_ELEMENTS = 2**24


class CapacityError(RuntimeError):
    """Tensor too large for the brute-force engine."""


@dataclass(frozen=True)
class FullIF:
    """Dense influence functional over L memory slots of dimension J."""

    values: np.ndarray = field(repr=False)
    L: int = 0
    dim: int = 0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.size != self.dim**self.L:
            raise ValueError("values must hold exactly J^L entries")
        object.__setattr__(self, "values", v)


def channel_cumulants(table: CumulantTable, spec: SystemSpec) -> np.ndarray:
    """Channel-pair cumulants KK[s, a, b] = sum_{i,j} w[a,i] w[b,j] K_ij(s).

    Shape (L+1, J, J).  Channel 0 has all-zero weights, so any pair
    involving the cavity vanishes.
    """
    w = spec.coupling_weights
    if w.shape[1] != table.n_baths:
        raise ValueError("coupling_weights width must match table baths")
    # entries: (B, B, L+1) -> (L+1, J, J)
    return np.einsum("ai,ijs,bj->sab", w, table.entries, w)


def q_factors(table: CumulantTable, spec: SystemSpec, m: StepMatrix):
    """Pair-correlation matrices Q^(r)[a, b] for r = 1..L.

    Q^(1) carries the step matrix and the self term:
        Q^(1)[a, b] = M[a, b] exp(KK_bb(0) + 2 KK_ab(1));
    for r > 1 simply Q^(r)[a, b] = exp(2 KK_ab(r)).
    Returned as an array of shape (L+1, J, J) with slot 0 unused.
    """
    kk = channel_cumulants(table, spec)
    L = table.neighbors
    j = spec.dim
    q = np.empty((L + 1, j, j), dtype=complex)
    q[0] = np.nan
    self_term = np.exp(np.diagonal(kk[0]))          # exp(KK_bb(0)), len J
    q[1] = m.m * np.exp(2 * kk[1]) * self_term[None, :]
    for r in range(2, L + 1):
        q[r] = np.exp(2 * kk[r])
    return q


def propagator_factor(table: CumulantTable, spec: SystemSpec,
                      r: int, i_a: int, i_1: int) -> complex:
    """Single element Q^(r)[i_a, i_1] of the factorized propagator.

    For r = 1 this includes the step matrix element and the self term of
    the newest index; for r > 1 it is a pure pair-correlation exponential.
    """
    if not 1 <= r <= table.neighbors:
        raise ValueError(f"lag r={r} outside 1..{table.neighbors}")
    j = spec.dim
    if not (0 <= i_a < j and 0 <= i_1 < j):
        raise ValueError("channel index out of range")
    kk = channel_cumulants(table, spec)
    if r == 1:
        from .system import step_matrix
        m = step_matrix(spec, table.step)
        return complex(m.m[i_a, i_1]
                       * np.exp(kk[0, i_1, i_1] + 2 * kk[1, i_a, i_1]))
    return complex(np.exp(2 * kk[r, i_a, i_1]))


def _digit(idx: np.ndarray, pos: int, j: int) -> np.ndarray:
    return (idx // j**pos) % j


def _step_weights(q: np.ndarray, L: int, j: int) -> np.ndarray:
    """W[m, i1] = product over slots 2..L of Q^(r-1)[digit, i1].

    m runs over the J^(L-1) configurations of (i_L .. i_2), i_2 least
    significant.  Step independent, so computed once per run.
    """
    n_rows = j**(L - 1)
    rows = np.arange(n_rows)
    w = np.ones((n_rows, j), dtype=complex)
    for r in range(2, L + 1):
        w *= q[r - 1][_digit(rows, r - 2, j)]
    return w


def propagate_full(spec: SystemSpec, table: CumulantTable, m: StepMatrix,
                   excitation: int, n_steps: int):
    """Run the full-tensor recursion; returns [F^(1), ..., F^(N)].

    F^(1) is filled with M[i_1, k]; each further step applies the
    factorized propagator and relabels the new index into the deepest slot.
    """
    L = table.neighbors
    j = spec.dim
    states = []
    for f in _iter_full(spec, table, m, excitation, n_steps):
        states.append(FullIF(values=f.copy(), L=L, dim=j))
    return states


def _iter_full(spec, table, m, excitation, n_steps):
    L = table.neighbors
    j = spec.dim
    if j**L > MAX_ELEMENTS:
        raise CapacityError(
            f"J^L = {j}**{L} = {j**L} exceeds the oracle cap {MAX_ELEMENTS}")
    q = q_factors(table, spec, m)
    weights = _step_weights(q, L, j)           # (J^(L-1), J)
    q_new = q[L]                               # couples the new index to i_1
    flat = np.arange(j**L)
    f = np.asarray(m.m)[flat % j, excitation].astype(complex)
    yield f
    for _ in range(n_steps - 1):
        fr = f.reshape(j**(L - 1), j)          # [m, i_1]
        t = weights * fr
        f = (t @ q_new.T).T.ravel()            # p most significant -> new i_L
        yield f


def readout_full(f: FullIF, table: CumulantTable, spec: SystemSpec,
                 j: int) -> complex:
    """P = exp(KK_jj(0)) * F[0...0, j]: all slots in the cavity channel
    except the newest, which carries the measurement channel."""
    kk = channel_cumulants(table, spec)
    return complex(f.values[j] * np.exp(kk[0, j, j]))


def trace_full(spec: SystemSpec, table: CumulantTable, m: StepMatrix,
               excitation: int, measure: int, n_steps: int) -> np.ndarray:
    """Readout at every step without retaining the tensors."""
    kk = channel_cumulants(table, spec)
    pref = np.exp(kk[0, measure, measure])
    out = np.empty(n_steps, dtype=complex)
    for n, f in enumerate(_iter_full(spec, table, m, excitation, n_steps)):
        out[n] = f[measure] * pref
    return out
