"""Compiled inner loops.  All kernels release the GIL."""
import numba
import numpy as np

jit = numba.njit(cache=True, nogil=True)

# symbol codes
SYM_0, SYM_A, SYM_B, SYM_C = 0, 1, 2, 3


@jit
def sample_chain(cum, q_cum, u, out):
    """Fill ``out`` with a Markov path.

    ``cum[:, j]`` is the cumulative column ``j`` of the column-stochastic
    matrix; ``q_cum`` the cumulative initial law; ``u`` uniforms.
    """
    s = q_cum.shape[0]
    x = 0
    while x < s - 1 and u[0] >= q_cum[x]:
        x += 1
    out[0] = x
    for k in range(1, u.shape[0]):
        y = 0
        while y < s - 1 and u[k] >= cum[y, x]:
            y += 1
        out[k] = y
        x = y


@jit
def segment_forms(word, starts, length, out_ok, out_diag, out_kappa, out_sign):
    """Parse ``word[s:s+length]`` for every start ``s`` into {C, D} form.

    ``'0'`` is a ``C`` factor and ``'abc'`` a ``D`` factor.  The product is
    formed as ``T(w_last) ... T(w_first)``, built by right multiplication
    while scanning the segment from its end.
    """
    for r in range(starts.shape[0]):
        s = starts[r]
        j = s + length - 1
        ok = True
        diag = True
        kappa = 0
        sign = 1
        while j >= s:
            x = word[j]
            if x == SYM_0:
                if not diag:
                    sign = -sign
                diag = not diag
                j -= 1
            elif x == SYM_C:
                if j - 2 < s or word[j - 1] != SYM_B or word[j - 2] != SYM_A:
                    ok = False
                    break
                kappa += 1 if diag else -1
                j -= 3
            else:
                ok = False
                break
        out_ok[r] = ok
        out_diag[r] = diag
        out_kappa[r] = kappa
        out_sign[r] = sign


@jit
def sturm_count(diag, x, strict):
    """Number of eigenvalues below ``x`` of ``tridiag(-1, diag, -1)``.

    LDL^T pivot recursion ``d_k = diag_k - x - 1 / d_{k-1}``.  A zero pivot is
    replaced by ``+pivmin`` when ``strict`` (count of eigenvalues ``< x``) and
    by ``-pivmin`` otherwise (count of eigenvalues ``<= x``).
    """
    pivmin = 1e-300
    count = 0
    d = 1.0
    first = True
    for k in range(diag.shape[0]):
        if first:
            d = diag[k] - x
            first = False
        else:
            d = diag[k] - x - 1.0 / d
        if d == 0.0:
            d = pivmin if strict else -pivmin
        elif abs(d) < pivmin:
            d = pivmin if d > 0 else -pivmin
        if d < 0.0:
            count += 1
    return count


@jit
def vector_log_growth(mats, symbols, u, burn_in):
    """Sum of ``log |A_k u_k|`` along a renormalized orbit.

    The first ``burn_in`` steps only align the direction.  ``u`` is updated
    in place with the final unit vector.
    """
    u0 = u[0]
    u1 = u[1]
    total = 0.0
    for k in range(symbols.shape[0]):
        m = mats[symbols[k]]
        w0 = m[0, 0] * u0 + m[0, 1] * u1
        w1 = m[1, 0] * u0 + m[1, 1] * u1
        nrm = np.sqrt(w0 * w0 + w1 * w1)
        u0 = w0 / nrm
        u1 = w1 / nrm
        if k >= burn_in:
            total += np.log(nrm)
    u[0] = u0
    u[1] = u1
    return total


@jit
def matrix_log_norms(mats, symbols, checkpoints):
    """``log ||A^(n)||`` (operator 2-norm) at each checkpoint ``n``."""
    out = np.empty(checkpoints.shape[0])
    a, b, c, d = 1.0, 0.0, 0.0, 1.0
    acc = 0.0
    ci = 0
    for k in range(symbols.shape[0]):
        m = mats[symbols[k]]
        na = m[0, 0] * a + m[0, 1] * c
        nb = m[0, 0] * b + m[0, 1] * d
        nc = m[1, 0] * a + m[1, 1] * c
        nd = m[1, 0] * b + m[1, 1] * d
        fro = np.sqrt(na * na + nb * nb + nc * nc + nd * nd)
        a, b, c, d = na / fro, nb / fro, nc / fro, nd / fro
        acc += np.log(fro)
        while ci < checkpoints.shape[0] and checkpoints[ci] == k + 1:
            # largest singular value of the normalized matrix
            s2 = a * a + b * b + c * c + d * d
            det = a * d - b * c
            disc = max(s2 * s2 - 4.0 * det * det, 0.0)
            smax = np.sqrt(0.5 * (s2 + np.sqrt(disc)))
            out[ci] = acc + np.log(smax)
            ci += 1
    return out


@jit
def induced_log_growth(mats, symbols, u, burn_in):
    """Log growth of the return-map cocycle on ``{0, a}``.

    Consumes the base path from its first ``0`` or ``a``; a ``0`` is one
    induced step, an ``a`` consumes ``abc``.  Returns ``(log_sum, returns,
    base_steps)`` counted after ``burn_in`` induced steps.
    """
    n = symbols.shape[0]
    k = 0
    while k < n and symbols[k] != SYM_0 and symbols[k] != SYM_A:
        k += 1
    u0 = u[0]
    u1 = u[1]
    total = 0.0
    returns = 0
    steps = 0
    done = 0
    while k < n:
        length = 1 if symbols[k] == SYM_0 else 3
        if k + length > n:
            break
        w0 = u0
        w1 = u1
        for j in range(k, k + length):
            m = mats[symbols[j]]
            t0 = m[0, 0] * w0 + m[0, 1] * w1
            t1 = m[1, 0] * w0 + m[1, 1] * w1
            w0 = t0
            w1 = t1
        nrm = np.sqrt(w0 * w0 + w1 * w1)
        u0 = w0 / nrm
        u1 = w1 / nrm
        if done >= burn_in:
            total += np.log(nrm)
            returns += 1
            steps += length
        done += 1
        k += length
    u[0] = u0
    u[1] = u1
    return total, returns, steps


@jit
def kifer_walk(letters):
    """Exact form of a ``{C, D}`` word (``0 = C``, ``1 = D``).

    Returns ``(sign, diagonal, kappa)`` of the product with the first letter
    acting first, folded from the right end as in ``segment_forms``.
    """
    diag = True
    kappa = 0
    sign = 1
    for j in range(letters.shape[0] - 1, -1, -1):
        if letters[j] == 1:
            kappa += 1 if diag else -1
        else:
            if not diag:
                sign = -sign
            diag = not diag
    return sign, diag, kappa


@jit
def sample_iid(cum, u, out):
    """I.i.d. symbols with cumulative law ``cum``."""
    s = cum.shape[0]
    for k in range(u.shape[0]):
        y = 0
        while y < s - 1 and u[k] >= cum[y]:
            y += 1
        out[k] = y


@jit
def enumerate_kappa(n):
    """Histogram of exact forms over all ``2^n`` ``{C, D}`` words.

    Word ``mask`` has letter ``j`` equal to ``D`` when bit ``j`` is set.
    Returns ``hist[diagonal, kappa + n]``.
    """
    hist = np.zeros((2, 2 * n + 1), dtype=np.int64)
    for mask in range(1 << n):
        diag = True
        kappa = 0
        for j in range(n - 1, -1, -1):
            if (mask >> j) & 1:
                kappa += 1 if diag else -1
            else:
                diag = not diag
        hist[1 if diag else 0, kappa + n] += 1
    return hist
