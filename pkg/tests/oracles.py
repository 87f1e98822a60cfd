"""Independent high-precision evaluations used as test oracles.

Everything here is written directly from the scalar closed forms with
mpmath at 50 significant digits and shares no code with gpot.
"""

import mpmath as mp

mp.mp.dps = 50


def _m(lam, eps):
    return -1 + mp.sqrt(1 + 16 * mp.mpf(lam) / mp.mpf(eps) ** 2)


def w2_sq(a, b, m0=0, m1=0):
    a, b = mp.mpf(a), mp.mpf(b)
    return (mp.mpf(m0) - m1) ** 2 + a + b - 2 * mp.sqrt(a * b)


def ot_eps(a, b, eps, m0=0, m1=0):
    a, b, eps = mp.mpf(a), mp.mpf(b), mp.mpf(eps)
    M = _m(a * b, eps)
    return (mp.mpf(m0) - m1) ** 2 + a + b - eps / 2 * M + eps / 2 * mp.log(1 + M / 2)


def sinkhorn(a, b, eps, m0=0, m1=0):
    a, b, eps = mp.mpf(a), mp.mpf(b), mp.mpf(eps)
    m00, m01, m11 = _m(a * a, eps), _m(a * b, eps), _m(b * b, eps)
    lin = eps / 4 * (m00 - 2 * m01 + m11)
    logs = eps / 4 * (
        2 * mp.log(1 + m01 / 2) - mp.log(1 + m00 / 2) - mp.log(1 + m11 / 2)
    )
    return (mp.mpf(m0) - m1) ** 2 + lin + logs


def cross_cov(a, b, eps):
    a, b, eps = mp.mpf(a), mp.mpf(b), mp.mpf(eps)
    return 2 / eps * a * b / (1 + _m(a * b, eps) / 2)


def g(lams, c):
    total = mp.mpf(0)
    for lam in lams:
        M = -1 + mp.sqrt(1 + mp.mpf(c) ** 2 * mp.mpf(lam))
        total += M - mp.log(1 + M / 2)
    return total


