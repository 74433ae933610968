"""numba kernels: one element at a time, compiled loops over the batch.

128-bit values are (hi, lo) pairs of uint64. Every literal that meets a
uint64 is wrapped in np.uint64 so numba never promotes to float64.
"""

import numpy as np
from numba import njit

U0 = np.uint64(0)
U1 = np.uint64(1)
U64 = np.uint64(64)


@njit(cache=True, inline="always")
def _mask(k):
    if k >= 64:
        return ~U0
    return (U1 << np.uint64(k)) - U1


@njit(cache=True, inline="always")
def shl128(hi, lo, k):
    if k == 0:
        return hi, lo
    if k >= 64:
        return lo << np.uint64(k - 64), U0
    uk = np.uint64(k)
    return (hi << uk) | (lo >> (U64 - uk)), lo << uk


@njit(cache=True, inline="always")
def shr128(hi, lo, k):
    if k == 0:
        return hi, lo
    if k >= 64:
        return U0, hi >> np.uint64(k - 64)
    uk = np.uint64(k)
    return hi >> uk, (lo >> uk) | (hi << (U64 - uk))


@njit(cache=True, inline="always")
def add128(ahi, alo, bhi, blo):
    lo = alo + blo
    carry = U1 if lo < alo else U0
    return ahi + bhi + carry, lo


@njit(cache=True, inline="always")
def sub128(ahi, alo, bhi, blo):
    lo = alo - blo
    borrow = U1 if alo < blo else U0
    return ahi - bhi - borrow, lo


@njit(cache=True)
def urdhva_leaf(a, b, n):
    """Column-sum product of two n-bit values (n <= 8)."""
    acc = U0
    for k in range(2 * n - 1):
        t = U0
        lo = k - n + 1 if k - n + 1 > 0 else 0
        hi = k if k < n - 1 else n - 1
        for i in range(lo, hi + 1):
            t += ((a >> np.uint64(i)) & U1) & ((b >> np.uint64(k - i)) & U1)
        acc += t << np.uint64(k)
    return acc


@njit(cache=True)
def urdhva_batch(a, b, n):
    out = np.empty(a.shape[0], dtype=np.uint64)
    for j in range(a.shape[0]):
        out[j] = urdhva_leaf(a[j], b[j], n)
    return out


@njit(cache=True)
def _karatsuba_one(a, b, splits, children, widths, opa, opb, ca, cb, phi, plo):
    nn = splits.shape[0]
    opa[0] = a
    opb[0] = b
    for i in range(nn):
        m = splits[i]
        if m == 0:
            continue
        mask = _mask(m)
        um = np.uint64(m)
        ah, al = opa[i] >> um, opa[i] & mask
        bh, bl = opb[i] >> um, opb[i] & mask
        c0, c1, c2 = children[i, 0], children[i, 1], children[i, 2]
        opa[c0], opb[c0] = ah, bh
        opa[c1], opb[c1] = al, bl
        sa, sb = ah + al, bh + bl
        ca[i], cb[i] = sa >> um, sb >> um
        opa[c2], opb[c2] = sa & mask, sb & mask
    for i in range(nn - 1, -1, -1):
        m = splits[i]
        if m == 0:
            phi[i] = U0
            plo[i] = urdhva_leaf(opa[i], opb[i], widths[i])
            continue
        c0, c1, c2 = children[i, 0], children[i, 1], children[i, 2]
        mh, ml = phi[c2], plo[c2]
        if ca[i]:
            xh, xl = shl128(U0, opb[c2], m)
            mh, ml = add128(mh, ml, xh, xl)
        if cb[i]:
            xh, xl = shl128(U0, opa[c2], m)
            mh, ml = add128(mh, ml, xh, xl)
        if ca[i] & cb[i]:
            xh, xl = shl128(U0, U1, 2 * m)
            mh, ml = add128(mh, ml, xh, xl)
        mh, ml = sub128(mh, ml, phi[c0], plo[c0])
        mh, ml = sub128(mh, ml, phi[c1], plo[c1])
        hh, hl = shl128(phi[c0], plo[c0], 2 * m)
        hh, hl = add128(hh, hl, phi[c1], plo[c1])
        mh, ml = shl128(mh, ml, m)
        phi[i], plo[i] = add128(hh, hl, mh, ml)
    return phi[0], plo[0]


@njit(cache=True)
def karatsuba_batch(a, b, splits, children, widths):
    n = a.shape[0]
    nn = splits.shape[0]
    hi = np.empty(n, dtype=np.uint64)
    lo = np.empty(n, dtype=np.uint64)
    opa = np.zeros(nn, dtype=np.uint64)
    opb = np.zeros(nn, dtype=np.uint64)
    ca = np.zeros(nn, dtype=np.uint64)
    cb = np.zeros(nn, dtype=np.uint64)
    phi = np.zeros(nn, dtype=np.uint64)
    plo = np.zeros(nn, dtype=np.uint64)
    for j in range(n):
        hi[j], lo[j] = _karatsuba_one(a[j], b[j], splits, children, widths, opa, opb, ca, cb, phi, plo)
    return hi, lo


@njit(cache=True)
def _classify(e, frac, emax):
    if e == 0:
        return 4 if frac != U0 else 1
    if e == emax:
        return 3 if frac != U0 else 2
    return 0


@njit(cache=True)
def fp_multiply_batch(a, b, exp_width, frac_width, bias, splits, children, widths):
    n = a.shape[0]
    nn = splits.shape[0]
    out = np.empty(n, dtype=np.uint64)
    flags = np.empty(n, dtype=np.uint8)
    opa = np.zeros(nn, dtype=np.uint64)
    opb = np.zeros(nn, dtype=np.uint64)
    ca = np.zeros(nn, dtype=np.uint64)
    cb = np.zeros(nn, dtype=np.uint64)
    phi = np.zeros(nn, dtype=np.uint64)
    plo = np.zeros(nn, dtype=np.uint64)

    F = frac_width
    uF = np.uint64(F)
    emax = (1 << exp_width) - 1
    uemax = np.uint64(emax)
    fmask = _mask(F)
    hidden = U1 << uF
    sign_pos = np.uint64(exp_width + frac_width)
    qnan = U1 << np.uint64(F - 1)

    for j in range(n):
        x, y = a[j], b[j]
        sign = ((x ^ y) >> sign_pos) & U1
        head = sign << sign_pos
        ex = np.int64((x >> uF) & uemax)
        ey = np.int64((y >> uF) & uemax)
        fx, fy = x & fmask, y & fmask
        nan_x = ex == emax and fx != U0
        nan_y = ey == emax and fy != U0
        inf_x = ex == emax and fx == U0
        inf_y = ey == emax and fy == U0
        zero_x = ex == 0 and fx == U0
        zero_y = ey == 0 and fy == U0

        if nan_x or nan_y or (inf_x and zero_y) or (inf_y and zero_x):
            e_out, f_out = emax, qnan
        elif inf_x or inf_y:
            e_out, f_out = emax, U0
        elif zero_x or zero_y:
            e_out, f_out = 0, U0
        else:
            sx = fx | hidden if ex != 0 else fx
            sy = fy | hidden if ey != 0 else fy
            exp = (ex if ex != 0 else 1) + (ey if ey != 0 else 1) - bias
            ph, pl = _karatsuba_one(sx, sy, splits, children, widths, opa, opb, ca, cb, phi, plo)
            th, tl = shr128(ph, pl, 2 * F + 1)
            if tl & U1:
                sh, sl = shr128(ph, pl, F + 1)
                sig = sl
                exp += 1
            else:
                while exp > 1:
                    th, tl = shr128(ph, pl, 2 * F)
                    if tl & U1:
                        break
                    ph, pl = shl128(ph, pl, 1)
                    exp -= 1
                sh, sl = shr128(ph, pl, F)
                sig = sl & _mask(F + 1)
            if exp >= emax:
                e_out, f_out = emax, U0
            elif exp >= 1:
                if sig & hidden:
                    e_out, f_out = exp, sig & fmask
                else:
                    e_out, f_out = 0, sig
            else:
                shift = 1 - exp
                e_out = 0
                f_out = sig >> np.uint64(shift) if shift < 64 else U0
        out[j] = head | (np.uint64(e_out) << uF) | f_out
        flags[j] = _classify(e_out, f_out, emax)
    return out, flags
