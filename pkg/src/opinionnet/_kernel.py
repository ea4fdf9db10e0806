"""Compiled inner loop for the asynchronous opinion sweep.

Semantically identical to iterating compute_neighborhood + update_agent over
the permutation (the engine test suite checks the agreement); exists because
the per-agent Python/numpy overhead dominates a run otherwise.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def sweep(theta, weights, self_weights, tolerances, reach, trust, u, order, p_nd, counts, frozen):
    """One full asynchronous sweep, updating theta (and counts) in place.

    reach[j, i]  whether a 2/3-hop walk j -> i exists in the pre-sweep graph
    trust[j, i]  mean path-weight product over those walks
    u[i, j]      the uniform draw deciding whether nondirect j is sampled by i
    frozen       read opinions from the sweep-start snapshot instead of live
    """
    n = theta.shape[0]
    theta_read = theta.copy() if frozen else theta
    sin_read = np.sin(theta_read)
    cos_read = np.cos(theta_read)
    for k in range(n):
        i = order[k]
        theta_i = theta_read[i]
        tol_i = tolerances[i]
        num = self_weights[i] * sin_read[i]
        den = self_weights[i] * cos_read[i]
        influenced = False
        for j in range(n):
            if j == i:
                continue
            d = theta_read[j] - theta_i
            if d < 0.0:
                d = -d
            if d > tol_i:
                continue
            w = weights[j, i]
            if w > 0.0:
                num += w * sin_read[j]
                den += w * cos_read[j]
                influenced = True
            elif reach[j, i]:
                if u[i, j] < p_nd:
                    counts[i, j] += 1
                    tw = trust[j, i]
                    num += tw * sin_read[j]
                    den += tw * cos_read[j]
                    influenced = True
        if influenced:
            new_theta = math.atan2(num, den)
            theta[i] = new_theta
            if not frozen:
                sin_read[i] = math.sin(new_theta)
                cos_read[i] = math.cos(new_theta)
