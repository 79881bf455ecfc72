"""Generate Chebyshev coefficients for K0(u)*e^u*sqrt(u) and K1(u)*e^u*sqrt(u)
on u in [2, inf), mapped through tau = 4/u - 1 (u=2 -> tau=1, u=inf -> tau=-1).
Interpolate at Chebyshev nodes with mpmath at 50 digits, print coefficients,
then report max relative error of the truncated float64 evaluation on a dense grid.
"""
import mpmath as mp

mp.mp.dps = 50

N = 40  # interpolation nodes


def scaled(nu, u):
    return mp.besselk(nu, u) * mp.exp(u) * mp.sqrt(u)


def u_of_tau(tau):
    return 4 / (tau + 1) if tau > -1 else mp.inf


def cheb_coeffs(nu, n):
    # Chebyshev-Gauss interpolation on tau in [-1, 1]
    xs = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / n) for k in range(n)]
    fs = []
    for tau in xs:
        if tau <= -1:
            fs.append(mp.sqrt(mp.pi / 2))
        else:
            u = 4 / (tau + 1)
            fs.append(scaled(nu, u))
    cs = []
    for j in range(n):
        s = mp.mpf(0)
        for k in range(n):
            s += fs[k] * mp.cos(mp.pi * j * (k + mp.mpf(1) / 2) / n)
        cs.append(2 * s / n)
    return cs


def clenshaw(cs, tau):
    b1 = mp.mpf(0)
    b2 = mp.mpf(0)
    for c in reversed(cs[1:]):
        b1, b2 = 2 * tau * b1 - b2 + c, b1
    return tau * b1 - b2 + cs[0] / 2


for nu in (0, 1):
    cs = cheb_coeffs(nu, N)
    # truncate below 1e-19
    keep = N
    while keep > 5 and abs(cs[keep - 1]) < mp.mpf("1e-19"):
        keep -= 1
    cs = cs[:keep]
    print(f"# K{nu}: kept {keep} coefficients")
    for c in cs:
        print(f"    {mp.nstr(c, 20)},")
    # error check with float64-rounded coefficients on dense u grid
    csf = [float(c) for c in cs]
    worst = mp.mpf(0)
    import math
    for i in range(400):
        u = 2 * math.exp(i / 399 * math.log(400))  # u in [2, 800]
        tau = 4 / u - 1
        b1 = 0.0
        b2 = 0.0
        for c in reversed(csf[1:]):
            b1, b2 = 2 * tau * b1 - b2 + c, b1
        approx = tau * b1 - b2 + csf[0] / 2
        exact = scaled(nu, mp.mpf(u))
        rel = abs(mp.mpf(approx) - exact) / exact
        if rel > worst:
            worst = rel
    print(f"# K{nu} max rel err on [2,800]: {mp.nstr(worst, 3)}")
