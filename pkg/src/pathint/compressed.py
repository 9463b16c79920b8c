"""SVD-compressed propagation of the influence functional.

The J^L influence tensor is held as a two-sided factorization U @ V with
L/2 memory slots mapped to the rows of U and L/2 to the columns of V.
Each slot list records which memory lag (1 = newest .. L = deepest) a
matrix dimension currently represents; position 0 is the least significant
digit of the row/column configuration index.  One propagation step scales
each side by the pair-correlation factors tied to its slots, splits over
the summed-out newest index and the incoming deepest index, relabels all
lags down by one, and truncates the inner rank by SVD.  After L/2 steps
the newest slot migrates to the U side, at which point the two sides are
transposed and swapped.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .bath import BathSpec, CumulantTable, build_cumulant_table
from .system import SystemSpec, StepMatrix, step_matrix
from .oracle import channel_cumulants, q_factors
from .trace import PolarizationTrace

__all__ = ["CompressedIF", "init_compressed", "apply_propagator", "truncate",
           "readout_compressed", "run_polarization", "reconstruct_full"]

# rescale the factorization when the leading singular value leaves this
# range; the shift is tracked in log_scale and reapplied at readout
_SCALE_MAX = 1e100
_SCALE_MIN = 1e-100


@dataclass(frozen=True)
class CompressedIF:
    """Influence functional in U @ V form with slot-label bookkeeping.

    Singular values are kept absorbed in ``v``; ``log_scale`` is a scalar
    log-prefactor split off to keep the matrices in floating range.
    """

    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    u_slots: tuple = ()
    v_slots: tuple = ()
    dim: int = 2
    threshold: float = 0.0
    step_count: int = 0
    log_scale: float = 0.0
    last_rank: int = 1

    @property
    def neighbors(self) -> int:
        return len(self.u_slots) + len(self.v_slots)

    @property
    def rank(self) -> int:
        return self.u.shape[1]

    @property
    def stored_elements(self) -> int:
        """Complex entries currently held (plus the conceptual Lambda)."""
        return self.u.size + self.v.size + self.rank

    def check(self):
        assert self.u.shape[1] == self.v.shape[0], "inner rank mismatch"
        assert self.u.shape[0] == self.dim ** len(self.u_slots)
        assert self.v.shape[1] == self.dim ** len(self.v_slots)
        assert sorted(self.u_slots + self.v_slots) == \
            list(range(1, self.neighbors + 1)), "slot labels not 1..L"


def init_compressed(m: StepMatrix, excitation: int, L: int, dim: int,
                    eps: float) -> CompressedIF:
    """Rank-1 analytic factorization of the initial influence functional.

    U is an all-ones column over the deep-slot configurations; V is a single
    row whose entry for column configuration c is M[i_1(c), excitation].
    """
    if L < 2 or L % 2 != 0:
        raise ValueError("L must be even and >= 2")
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must be in [0, 1)")
    half = L // 2
    side = dim**half
    u = np.ones((side, 1), dtype=complex)
    v = np.asarray(m.m)[np.arange(side) % dim, excitation] \
        .astype(complex).reshape(1, side)
    state = CompressedIF(
        u=u, v=v,
        u_slots=tuple(range(half + 1, L + 1)),
        v_slots=tuple(range(1, half + 1)),
        dim=dim, threshold=eps)
    state.check()
    return state


def _swap_sides(state: CompressedIF) -> CompressedIF:
    """Transpose U and V and exchange their slot lists (same tensor)."""
    return replace(state, u=state.v.T.copy(), v=state.u.T.copy(),
                   u_slots=state.v_slots, v_slots=state.u_slots)


def _digits(n_configs: int, pos: int, dim: int) -> np.ndarray:
    return (np.arange(n_configs) // dim**pos) % dim


def apply_propagator(state: CompressedIF, table: CumulantTable,
                     spec: SystemSpec, m: StepMatrix) -> CompressedIF:
    """One propagation step: sum out the newest index, bring in the new
    deepest index, relabel every slot down by one lag."""
    state.check()
    L = state.neighbors
    dim = state.dim
    if table.neighbors != L or spec.dim != dim:
        raise ValueError("table/system dimensions do not match the state")
    if 1 in state.u_slots:
        state = _swap_sides(state)
    assert state.v_slots[0] == 1, "newest slot must sit at V position 0"

    q = q_factors(table, spec, m)
    rank = state.rank
    n_rows = state.u.shape[0]
    m_cols = state.v.shape[1]
    m_rest = m_cols // dim

    # U side: every slot there pairs with i_1 through its lag-(r-1) factor
    mult_u = np.ones((n_rows, dim), dtype=complex)
    for pos, r in enumerate(state.u_slots):
        mult_u *= q[r - 1][_digits(n_rows, pos, dim)]
    new_u = (mult_u[:, :, None] * state.u[:, None, :]) \
        .reshape(n_rows, dim * rank)

    # V side: peel off i_1 (position 0), scale the remaining slots, and
    # split into column blocks over the incoming index p (lag L factor)
    cmult = np.ones((m_rest, dim), dtype=complex)
    for pos, r in enumerate(state.v_slots[1:], start=1):
        cmult *= q[r - 1][_digits(m_rest, pos - 1, dim)]
    vr = state.v.reshape(rank, m_rest, dim)            # [k, rest, i_1]
    new_v = np.einsum("pi,mi,kmi->ikpm", q[L], cmult, vr) \
        .reshape(dim * rank, dim * m_rest)

    out = replace(
        state, u=new_u, v=new_v,
        u_slots=tuple(r - 1 for r in state.u_slots),
        v_slots=tuple(r - 1 for r in state.v_slots[1:]) + (L,),
        step_count=state.step_count + 1)
    out.check()
    return out


def truncate(state: CompressedIF) -> CompressedIF:
    """Drop singular values of the full factorization below eps * lambda_max.

    U is first brought to orthonormal columns by a QR factorization, so the
    SVD of R @ V yields the true singular spectrum of U @ V and the cut acts
    on it directly.  U keeps the orthonormal left factors, V absorbs the
    singular values.  Values exactly at the threshold are kept.
    """
    eps = state.threshold
    q, r = np.linalg.qr(state.u)
    a, s, vt = np.linalg.svd(r @ state.v, full_matrices=False)
    smax = s[0] if s.size else 0.0
    keep = max(1, int(np.count_nonzero(s >= eps * smax)))
    new_u = q @ a[:, :keep]
    new_v = s[:keep, None] * vt[:keep]
    log_scale = state.log_scale

    if smax > 0 and not _SCALE_MIN < smax < _SCALE_MAX:
        new_v = new_v / smax
        log_scale += np.log(smax)

    return replace(state, u=new_u, v=new_v, log_scale=log_scale,
                   last_rank=keep)


def readout_compressed(state: CompressedIF, table: CumulantTable,
                       spec: SystemSpec, j: int) -> complex:
    """Contract the all-cavity configuration with the newest slot at channel
    j, times the self-term prefactor exp(KK_jj(0))."""
    kk = channel_cumulants(table, spec)
    if 1 in state.v_slots:
        col = j * state.dim ** state.v_slots.index(1)
        amp = state.u[0] @ state.v[:, col]
    else:
        row = j * state.dim ** state.u_slots.index(1)
        amp = state.u[row] @ state.v[:, 0]
    return complex(amp * np.exp(kk[0, j, j] + state.log_scale))


def reconstruct_full(state: CompressedIF) -> np.ndarray:
    """Dense J^L tensor, flat index = sum_r i_r J^(r-1), for verification."""
    dim = state.dim
    lu = len(state.u_slots)
    lv = len(state.v_slots)
    f = (state.u @ state.v) * np.exp(state.log_scale)
    f = f.reshape((dim,) * (lu + lv))
    # axis 0 is the most significant U digit, i.e. slot u_slots[-1]
    axis_of_lag = {}
    for pos, r in enumerate(state.u_slots):
        axis_of_lag[r] = lu - 1 - pos
    for pos, r in enumerate(state.v_slots):
        axis_of_lag[r] = lu + lv - 1 - pos
    perm = [axis_of_lag[r] for r in range(state.neighbors, 0, -1)]
    return np.transpose(f, axes=perm).ravel()


def run_polarization(spec: SystemSpec, bath: BathSpec, dt: float, L: int,
                     n_steps: int, eps: float, excitation: int, measure: int,
                     table: CumulantTable = None) -> PolarizationTrace:
    """Full compressed propagation with per-step truncation and readout.

    Returns P(t_n) for n = 1..N on the grid t_n = n dt, with per-step rank
    and storage diagnostics in the trace metadata.  A prebuilt cumulant
    table for the same (bath, dt, L) may be passed to skip the quadratures.
    """
    if table is None:
        table = build_cumulant_table(bath, dt, L)
    m = step_matrix(spec, dt)
    state = init_compressed(m, excitation, L, spec.dim, eps)
    values = np.empty(n_steps, dtype=complex)
    ranks = np.empty(n_steps, dtype=int)
    stored = np.empty(n_steps, dtype=int)
    values[0] = readout_compressed(state, table, spec, measure)
    ranks[0] = state.rank
    stored[0] = state.stored_elements
    for n in range(1, n_steps):
        state = apply_propagator(state, table, spec, m)
        state = truncate(state)
        values[n] = readout_compressed(state, table, spec, measure)
        ranks[n] = state.rank
        stored[n] = state.stored_elements
    meta = {
        "engine": "compressed",
        "L": L, "dt": dt, "eps": eps, "n_steps": n_steps,
        "excitation": excitation, "measure": measure,
        "dim": spec.dim,
        "ranks": ranks, "stored_elements": stored,
        "peak_stored": int(stored.max()),
    }
    times = dt * np.arange(1, n_steps + 1)
    return PolarizationTrace(times=times, values=values, meta=meta)
