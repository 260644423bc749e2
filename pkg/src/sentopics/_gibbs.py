"""Compiled inner loop of the collapsed Gibbs sampler.

Counts live in float64 tensors (exact for integer values far beyond corpus
scale) so the kernel never converts between int and float. Randomness comes
in as one pre-drawn uniform per token, keeping the caller's generator the
single source of randomness.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def sweep(
    token_word,
    token_doc,
    lab,
    top,
    n_lzw,
    n_lz,
    n_dlz,
    n_dl,
    n_d,
    prior,
    prior_sum,
    alpha,
    alpha_sum,
    gamma,
    uniforms,
    buf,
):
    """Resample (l, z) once for every token, updating counts in place.

    Returns the number of tokens whose conditional had no positive mass
    (their old assignment is kept so counts stay consistent).
    """
    S, T = n_lz.shape
    cells = S * T
    bad = 0
    for i in range(token_word.shape[0]):
        w = token_word[i]
        d = token_doc[i]
        l0 = lab[i]
        z0 = top[i]

        n_lzw[l0, z0, w] -= 1.0
        n_lz[l0, z0] -= 1.0
        n_dlz[d, l0, z0] -= 1.0
        n_dl[d, l0] -= 1.0
        nd_minus = n_d[d] - 1.0

        total = 0.0
        k = 0
        for l in range(S):
            sent_term = (n_dl[d, l] + gamma) / (nd_minus + S * gamma)
            denom_dl = n_dl[d, l] + alpha_sum[l]
            word_prior = prior[l, w]
            for z in range(T):
                p = (
                    (n_lzw[l, z, w] + word_prior) / (n_lz[l, z] + prior_sum[l])
                    * (n_dlz[d, l, z] + alpha[l, z]) / denom_dl
                    * sent_term
                )
                total += p
                buf[k] = total
                k += 1

        if total <= 0.0 or not np.isfinite(total):
            bad += 1
            l1 = l0
            z1 = z0
        else:
            u = uniforms[i] * total
            k = 0
            while buf[k] < u and k < cells - 1:
                k += 1
            l1 = k // T
            z1 = k - l1 * T

        lab[i] = l1
        top[i] = z1
        n_lzw[l1, z1, w] += 1.0
        n_lz[l1, z1] += 1.0
        n_dlz[d, l1, z1] += 1.0
        n_dl[d, l1] += 1.0
    return bad
