"""Fused per-path loops for desk-scale Monte Carlo (compiled with numba).

They mirror the numpy reference implementation in ``simulate`` step for step; the
only difference is summation order inside a path.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

LOG_2PI = math.log(2.0 * math.pi)

# columns of the insider-view output
W_INSIDER, W_INSIDER_XDP, W_NOISE, W_NOISE_IBP, W_LIQUIDITY, COL_V, COL_P_PRE, COL_P1, COL_DY1 = range(9)
N_WEALTH_COLS = 9


@njit(cache=True)
def insider_wealth(normals, g, w, c, cz, r, mu, gamma, sdt, s2, phi, lam, lam_f, c0, c1, informed, out):
    n_paths = normals.shape[0]
    n = g.shape[0]
    for i in range(n_paths):
        v = mu + gamma * normals[i, 0]
        target = (v - phi) / lam if informed else 0.0
        y = 0.0
        z = 0.0
        p = phi
        sx = 0.0
        sz = 0.0
        sy = 0.0
        sdx = 0.0
        spdz = 0.0
        for k in range(n):
            dz = sdt * normals[i, 1 + 2 * k]
            if informed and k == n - 1:
                yn = target
            else:
                yn = g[k] * y + w[k] * target + c[k] + cz[k] * dz + r[k] * normals[i, 2 + 2 * k]
            zn = z + dz
            pn = phi + lam * yn
            dp = pn - p
            x = y - z
            xn = yn - zn
            sx += x * dp
            sz += z * dp
            sy += y * dp
            sdx += (v - p) * (xn - x)
            spdz += p * dz
            y = yn
            z = zn
            p = pn
        tv = v if informed else mu
        dy1 = (tv - c0 - (1.0 + c1) * p) / (2.0 * lam_f)
        p1 = p + c1 * p + c0 + lam_f * dy1
        x = y - z
        out[i, W_INSIDER] = sdx + (v - p1) * dy1
        out[i, W_INSIDER_XDP] = sx + x * (p1 - p) + (x + dy1) * (v - p1)
        out[i, W_NOISE] = sz + z * (p1 - p) + z * (v - p1)
        out[i, W_NOISE_IBP] = z * v - spdz - lam * s2
        out[i, W_LIQUIDITY] = -sy - y * (p1 - p) + (y + dy1) * (p1 - v)
        out[i, COL_V] = v
        out[i, COL_P_PRE] = p
        out[i, COL_P1] = p1
        out[i, COL_DY1] = dy1


@njit(cache=True)
def market_gains(
    normals, gq, cq, sq, gp, cp, sp, log_ratio, mu, phi, lam, lam_f, c0, c1, informed, record, out, rec_out
):
    """Demand paths drawn from the proposal (gq, cq, sq) with the log-likelihood ratio
    against the target transitions (gp, cp, sp); log_ratio = log(sp / sq).  For
    uninformed kinds the gain is evaluated at V = mu and the caller integrates V out."""
    n_paths = normals.shape[0]
    n = gq.shape[0]
    n_rec = record.shape[0]
    for i in range(n_paths):
        y = 0.0
        p = phi
        sy = 0.0
        logw = 0.0
        slot = 0
        if n_rec > 0 and record[0] == 0:
            rec_out[i, 0] = 0.0
            slot = 1
        for k in range(n):
            yn = gq[k] * y + cq[k] + sq[k] * normals[i, k]
            ep = (yn - gp[k] * y - cp[k]) / sp[k]
            logw += 0.5 * (normals[i, k] * normals[i, k] - ep * ep) - log_ratio[k]
            pn = phi + lam * yn
            sy += y * (pn - p)
            y = yn
            p = pn
            if slot < n_rec and record[slot] == k + 1:
                rec_out[i, slot] = y
                slot += 1
        v = phi + lam * y if informed else mu
        dy1 = (v - c0 - (1.0 + c1) * p) / (2.0 * lam_f)
        p1 = p + c1 * p + c0 + lam_f * dy1
        out[i, 0] = -sy - y * (p1 - p) + (y + dy1) * (p1 - v)
        out[i, 1] = logw
        out[i, 2] = y + dy1


def empty_outputs(n_paths: int, n_rec: int):
    return np.empty((n_paths, 3)), np.empty((n_paths, max(n_rec, 1)))
