"""Compiled batch evaluation: decode + simulate + objectives for many genomes.

This is the hot path used by the optimizers. It follows exactly the same
arithmetic as :mod:`stitchplan.sim` and :mod:`stitchplan.objectives`; the
test-suite checks the two routes agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numba as nb
import numpy as np

from .domain import Dataset

SCOPE_CODES = {"order_day": 0, "line_day": 1}

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_C1 = np.uint64(0xBF58476D1CE4E5B9)
_C2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV_2_53 = 1.0 / 9007199254740992.0


@nb.njit(cache=True, inline="always")
def _splitmix64(z):
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _C1
    z = (z ^ (z >> _S27)) * _C2
    return z ^ (z >> _S31)


@nb.njit(cache=True, inline="always")
def _uniform(seed, sample, stream, day):
    h = _splitmix64(seed)
    h = _splitmix64(h ^ np.uint64(sample))
    h = _splitmix64(h ^ np.uint64(stream))
    h = _splitmix64(h ^ np.uint64(day))
    return float(h >> _S11) * _INV_2_53


@nb.njit(cache=True, inline="always")
def _round_half_up(x):
    return int(np.floor(x + 0.5))


@nb.njit(cache=True)
def _decode_line(value, tid, m, eff):
    line = _round_half_up(value)
    if line < 1:
        line = 1
    if line > m:
        line = m
    for step in range(m):
        cand = (line - 1 + step) % m + 1
        if eff[cand - 1, tid] > 0.0:
            return cand
    return -1


@nb.njit(cache=True)
def _curve(curve_days, curve_eff, curve_len, tid, u):
    k = 0
    for i in range(curve_len[tid]):
        if curve_days[tid, i] <= u:
            k = i
        else:
            break
    return curve_eff[tid, k]


@nb.njit(cache=True)
def _evaluate(genomes, seeds, n_samples, beta, scope, p_day,
              cap, eff, o_type, o_qty, o_smv, o_due, o_cday,
              curve_days, curve_eff, curve_len):
    n_ind = genomes.shape[0]
    n = o_type.shape[0]
    m = cap.shape[0]
    out = np.zeros((n_ind, 2))
    s_line = np.empty(2 * n, np.int64)
    s_qty = np.empty(2 * n, np.int64)
    s_order = np.empty(2 * n, np.int64)
    s_idx = np.empty(2 * n, np.int64)
    s_key = np.empty(2 * n)
    seq = np.empty(2 * n, np.int64)
    line_start = np.empty(m + 1, np.int64)
    a_min = np.empty(n, np.int64)
    f_max = np.empty(n, np.int64)

    for ind in range(n_ind):
        g = genomes[ind]
        # decode
        cnt = 0
        for j in range(n):
            tid = o_type[j]
            l1 = _decode_line(g[2 * j], tid, m, eff)
            l2 = _decode_line(g[2 * j + 1], tid, m, eff)
            key = g[3 * n + j]
            q = o_qty[j]
            split = False
            q1 = q
            if l1 != l2:
                k = int(np.floor((g[2 * n + j] - 0.1) / 0.2))
                if k < 0:
                    k = 0
                if k > 3:
                    k = 3
                if k == 0:
                    alpha = 0.2
                elif k == 1:
                    alpha = 0.4
                elif k == 2:
                    alpha = 0.6
                else:
                    alpha = 0.8
                q1 = _round_half_up(alpha * q)
                if q1 <= 0:
                    l1 = l2
                    q1 = q
                elif q1 >= q:
                    q1 = q
                else:
                    split = True
            s_line[cnt] = l1
            s_qty[cnt] = q1
            s_order[cnt] = j
            s_idx[cnt] = 0
            s_key[cnt] = key
            cnt += 1
            if split:
                s_line[cnt] = l2
                s_qty[cnt] = q - q1
                s_order[cnt] = j
                s_idx[cnt] = 1
                s_key[cnt] = key
                cnt += 1

        # sequence: bucket by line, insertion sort by (key, order, index)
        pos = 0
        for ln in range(1, m + 1):
            line_start[ln - 1] = pos
            for s in range(cnt):
                if s_line[s] == ln:
                    t = pos
                    while t > line_start[ln - 1]:
                        p = seq[t - 1]
                        if (s_key[p] > s_key[s]
                                or (s_key[p] == s_key[s] and (s_order[p] > s_order[s]
                                    or (s_order[p] == s_order[s] and s_idx[p] > s_idx[s])))):
                            seq[t] = p
                            t -= 1
                        else:
                            break
                    seq[t] = s
                    pos += 1
        line_start[m] = pos

        f1_sum = 0.0
        f2_sum = 0.0
        for h in range(n_samples):
            for j in range(n):
                a_min[j] = 1 << 60
                f_max[j] = -(1 << 60)
            for ln in range(1, m + 1):
                c = cap[ln - 1]
                day = p_day - 1
                used = 0.0
                last_type = -1
                u_days = 0
                for t in range(line_start[ln - 1], line_start[ln]):
                    s = seq[t]
                    j = s_order[s]
                    tid = o_type[j]
                    e_p = eff[ln - 1, tid]
                    smv = o_smv[j]
                    if last_type == tid and used < c:
                        n_time = c - used
                        u = u_days
                    elif last_type == tid:
                        day += 1
                        n_time = c
                        u = u_days + 1
                    else:
                        day += 1
                        n_time = c
                        u = 1
                    a_day = day
                    qty = s_qty[s]
                    q_sum = 0.0
                    d = 1
                    while True:
                        e_o = _curve(curve_days, curve_eff, curve_len, tid, u)
                        noise = 0.0
                        if beta != 0.0:
                            if scope == 1:
                                r = _uniform(seeds[ind], h, ln, day)
                            else:
                                r = _uniform(seeds[ind], h, 4 * (j + 1) + s_idx[s], d)
                            noise = beta * (2.0 * r - 1.0)
                        qd = n_time * e_p * e_o / smv * (1.0 + noise)
                        if q_sum + qd >= qty:
                            remaining = qty - q_sum
                            needed = remaining * smv / (e_p * e_o)
                            used = (c - n_time) + min(n_time, needed)
                            break
                        q_sum += qd
                        day += 1
                        d += 1
                        u += 1
                        n_time = c
                    f_day = a_day + d
                    last_type = tid
                    u_days = u
                    if a_day < a_min[j]:
                        a_min[j] = a_day
                    if f_day > f_max[j]:
                        f_max[j] = f_day
            f1 = 0.0
            f2 = 0.0
            for j in range(n):
                late = f_max[j] - o_due[j]
                if late > 0:
                    f1 += late
                early = o_cday[j] - a_min[j]
                if early > 0:
                    f2 += early
            f1_sum += f1
            f2_sum += f2
        out[ind, 0] = f1_sum / n_samples
        out[ind, 1] = f2_sum / n_samples
    return out


@dataclass(frozen=True)
class PackedDataset:
    """Array form of a dataset for the compiled evaluator."""

    cap: np.ndarray
    eff: np.ndarray
    o_type: np.ndarray
    o_qty: np.ndarray
    o_smv: np.ndarray
    o_due: np.ndarray
    o_cday: np.ndarray
    curve_days: np.ndarray
    curve_eff: np.ndarray
    curve_len: np.ndarray
    p_day: int


def pack(dataset: Dataset, c_days) -> PackedDataset:
    n_types = max(t.id for t in dataset.types)
    k = max(len(t.learning_curve.breakpoints) for t in dataset.types)
    curve_days = np.zeros((n_types + 1, k), np.int64)
    curve_eff = np.ones((n_types + 1, k))
    curve_len = np.zeros(n_types + 1, np.int64)
    for t in dataset.types:
        bps = t.learning_curve.breakpoints
        curve_len[t.id] = len(bps)
        for i, (d, e) in enumerate(bps):
            curve_days[t.id, i] = d
            curve_eff[t.id, i] = e
    eff = np.zeros((dataset.n_lines, n_types + 1))
    for i, ln in enumerate(dataset.lines):
        for tid, e in ln.efficiency_by_type.items():
            eff[i, tid] = e
    return PackedDataset(
        cap=np.array([ln.capacity_minutes_per_day for ln in dataset.lines], dtype=float),
        eff=eff,
        o_type=np.array([o.product_type for o in dataset.orders], np.int64),
        o_qty=np.array([o.quantity for o in dataset.orders], np.int64),
        o_smv=np.array([o.smv for o in dataset.orders], dtype=float),
        o_due=np.array([o.due_day for o in dataset.orders], np.int64),
        o_cday=np.asarray(c_days, dtype=np.int64),
        curve_days=curve_days,
        curve_eff=curve_eff,
        curve_len=curve_len,
        p_day=dataset.p_day,
    )


def to_u64(seeds) -> np.ndarray:
    return np.array([int(s) & 0xFFFFFFFFFFFFFFFF for s in np.atleast_1d(seeds)], dtype=np.uint64)


def evaluate_packed(packed: PackedDataset, genomes, seeds, n_samples: int, beta: float,
                    scope: str = "order_day") -> np.ndarray:
    genomes = np.ascontiguousarray(np.atleast_2d(genomes), dtype=np.float64)
    seeds = to_u64(seeds)
    if seeds.shape[0] == 1 and genomes.shape[0] > 1:
        seeds = np.repeat(seeds, genomes.shape[0])
    return _evaluate(genomes, seeds, int(n_samples), float(beta), SCOPE_CODES[scope], packed.p_day,
                     packed.cap, packed.eff, packed.o_type, packed.o_qty, packed.o_smv,
                     packed.o_due, packed.o_cday, packed.curve_days, packed.curve_eff,
                     packed.curve_len)
