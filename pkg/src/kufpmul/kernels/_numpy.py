"""Pure-numpy batch kernels: whole-batch array ops, one plan node at a time.

numpy leaves shifts of 64 or more undefined, so every shift goes through
_shl/_shr, which handle the k == 0 and k >= 64 cases explicitly.
"""

import numpy as np

U0 = np.uint64(0)
U1 = np.uint64(1)


def _mask(k):
    return ~U0 if k >= 64 else np.uint64((1 << k) - 1)


def _shl(x, k):
    if k >= 64:
        return np.zeros_like(x)
    return x << np.uint64(k)


def _shr(x, k):
    if k >= 64:
        return np.zeros_like(x)
    return x >> np.uint64(k)


def shl128(hi, lo, k):
    if k == 0:
        return hi, lo
    if k >= 64:
        return _shl(lo, k - 64), np.zeros_like(lo)
    return _shl(hi, k) | _shr(lo, 64 - k), _shl(lo, k)


def shr128(hi, lo, k):
    if k == 0:
        return hi, lo
    if k >= 64:
        return np.zeros_like(hi), _shr(hi, k - 64)
    return _shr(hi, k), _shr(lo, k) | _shl(hi, 64 - k)


def add128(ahi, alo, bhi, blo):
    lo = alo + blo
    return ahi + bhi + (lo < alo).astype(np.uint64), lo


def sub128(ahi, alo, bhi, blo):
    return ahi - bhi - (alo < blo).astype(np.uint64), alo - blo


def urdhva_batch(a, b, n):
    abits = [(a >> np.uint64(i)) & U1 for i in range(n)]
    bbits = [(b >> np.uint64(i)) & U1 for i in range(n)]
    acc = np.zeros(a.shape, dtype=np.uint64)
    for k in range(2 * n - 1):
        t = np.zeros(a.shape, dtype=np.uint64)
        for i in range(max(0, k - n + 1), min(k, n - 1) + 1):
            t += abits[i] & bbits[k - i]
        acc += t << np.uint64(k)
    return acc


def karatsuba_batch(a, b, splits, children, widths):
    nn = len(splits)
    opa = [None] * nn
    opb = [None] * nn
    carries = [None] * nn
    opa[0], opb[0] = a, b
    for i in range(nn):
        m = int(splits[i])
        if m == 0:
            continue
        mask = _mask(m)
        ah, al = _shr(opa[i], m), opa[i] & mask
        bh, bl = _shr(opb[i], m), opb[i] & mask
        c0, c1, c2 = (int(c) for c in children[i])
        opa[c0], opb[c0] = ah, bh
        opa[c1], opb[c1] = al, bl
        sa, sb = ah + al, bh + bl
        carries[i] = (_shr(sa, m), _shr(sb, m))
        opa[c2], opb[c2] = sa & mask, sb & mask

    prod = [None] * nn
    for i in range(nn - 1, -1, -1):
        m = int(splits[i])
        if m == 0:
            prod[i] = (np.zeros_like(opa[i]), urdhva_batch(opa[i], opb[i], int(widths[i])))
            continue
        c0, c1, c2 = (int(c) for c in children[i])
        ca, cb = carries[i]
        mh, ml = prod[c2]
        # gated carry corrections: multiplying by a 0/1 carry is an AND gate
        mh, ml = add128(mh, ml, *shl128(np.zeros_like(ml), opb[c2] * ca, m))
        mh, ml = add128(mh, ml, *shl128(np.zeros_like(ml), opa[c2] * cb, m))
        mh, ml = add128(mh, ml, *shl128(np.zeros_like(ml), ca & cb, 2 * m))
        mh, ml = sub128(mh, ml, *prod[c0])
        mh, ml = sub128(mh, ml, *prod[c1])
        hh, hl = shl128(*prod[c0], 2 * m)
        hh, hl = add128(hh, hl, *prod[c1])
        prod[i] = add128(hh, hl, *shl128(mh, ml, m))
        # children are no longer needed
        prod[c0] = prod[c1] = prod[c2] = None
    return prod[0]


def _classify(e, frac, emax):
    flags = np.zeros(e.shape, dtype=np.uint8)
    nz = frac != U0
    flags[(e == 0) & ~nz] = 1
    flags[(e == emax) & ~nz] = 2
    flags[(e == emax) & nz] = 3
    flags[(e == 0) & nz] = 4
    return flags


def fp_multiply_batch(a, b, exp_width, frac_width, bias, splits, children, widths):
    F = frac_width
    emax = (1 << exp_width) - 1
    fmask = _mask(F)
    hidden = U1 << np.uint64(F)
    sign_pos = exp_width + frac_width

    sign = _shr(a ^ b, sign_pos) & U1
    ex = (_shr(a, F) & np.uint64(emax)).astype(np.int64)
    ey = (_shr(b, F) & np.uint64(emax)).astype(np.int64)
    fx, fy = a & fmask, b & fmask
    nan_x, nan_y = (ex == emax) & (fx != 0), (ey == emax) & (fy != 0)
    inf_x, inf_y = (ex == emax) & (fx == 0), (ey == emax) & (fy == 0)
    zero_x, zero_y = (ex == 0) & (fx == 0), (ey == 0) & (fy == 0)

    is_nan = nan_x | nan_y | (inf_x & zero_y) | (inf_y & zero_x)
    is_inf = ~is_nan & (inf_x | inf_y)
    is_zero = ~is_nan & ~is_inf & (zero_x | zero_y)
    finite = ~(is_nan | is_inf | is_zero)

    e_out = np.zeros(a.shape, dtype=np.int64)
    f_out = np.zeros(a.shape, dtype=np.uint64)
    e_out[is_nan | is_inf] = emax
    f_out[is_nan] = U1 << np.uint64(F - 1)

    idx = np.nonzero(finite)[0]
    if idx.size:
        exa, exb = ex[idx], ey[idx]
        sx = np.where(exa != 0, fx[idx] | hidden, fx[idx])
        sy = np.where(exb != 0, fy[idx] | hidden, fy[idx])
        exp = np.maximum(exa, 1) + np.maximum(exb, 1) - bias
        ph, pl = karatsuba_batch(sx, sy, splits, children, widths)

        top = shr128(ph, pl, 2 * F + 1)[1] & U1
        over = top == U1
        sig = np.empty(idx.size, dtype=np.uint64)
        sig[over] = shr128(ph[over], pl[over], F + 1)[1]
        exp[over] += 1

        # left shifts only for products whose hidden position is empty
        rest = np.nonzero(~over)[0]
        h, l = ph[rest], pl[rest]
        e = exp[rest]
        while True:
            need = ((shr128(h, l, 2 * F)[1] & U1) == U0) & (e > 1)
            if not need.any():
                break
            sh, sl = shl128(h[need], l[need], 1)
            h[need], l[need] = sh, sl
            e[need] -= 1
        exp[rest] = e
        sig[rest] = shr128(h, l, F)[1] & _mask(F + 1)

        ef = np.zeros(idx.size, dtype=np.int64)
        ff = np.zeros(idx.size, dtype=np.uint64)
        ovf = exp >= emax
        ef[ovf] = emax
        norm = ~ovf & (exp >= 1)
        has_hidden = (sig & hidden) != U0
        ok = norm & has_hidden
        ef[ok] = exp[ok]
        ff[ok] = sig[ok] & fmask
        edge = norm & ~has_hidden
        ff[edge] = sig[edge]
        under = exp < 1
        shift = np.minimum(1 - exp[under], 64)
        ff[under] = np.where(shift < 64, sig[under] >> np.minimum(shift, 63).astype(np.uint64), U0)
        e_out[idx] = ef
        f_out[idx] = ff

    out = _shl(sign, sign_pos) | _shl(e_out.astype(np.uint64), F) | f_out
    return out, _classify(e_out, f_out, emax)
