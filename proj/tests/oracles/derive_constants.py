"""Arbitrary-precision reference values frozen into the C++ tests.

Every quantity here is evaluated from its literal defining formula with
mpmath at 40+ significant digits; nothing reuses the library's algorithms.
Run:  python3 tests/oracles/derive_constants.py
"""
from mpmath import mp, mpf, exp, log, factorial, gamma, quad, hyperu, loggamma, sin

mp.dps = 45


def jain_weight(v, lam, beta):
    """omega_beta(v, lam) exactly as written: lam (lam+v beta)^(v-1) e^-(lam+v beta) / v!"""
    if v == 0:
        return exp(-lam)
    return lam * (lam + v * beta) ** (v - 1) * exp(-(lam + v * beta)) / factorial(v)


def baskakov_kernel(n, c, v, t):
    a = n / c
    return c * gamma(a + v - 1) / (gamma(v) * gamma(a)) * (c * t) ** (v - 1) / (1 + c * t) ** (a + v - 1)


def kernel_average(n, c, v, f):
    """(n-c)/c * int_0^inf p_{n,v-1,c}(t) f(t) dt by direct quadrature in t."""
    return (n - c) / c * quad(lambda t: baskakov_kernel(n, c, v, t) * f(t), [0, 1, 10, mp.inf])


def jain_baskakov(n, c, beta, x, f, vmax):
    lam = n * x
    total = jain_weight(0, lam, beta) * f(mpf(0))
    for v in range(1, vmax + 1):
        total += jain_weight(v, lam, beta) * kernel_average(n, c, v, f)
    return total


def main():
    # jain_basis_log(beta=0.25, n=10, x=0.5, v=7)
    print("log_omega(0.25,10,0.5,7) =", mp.nstr(log(jain_weight(7, mpf(10) * mpf("0.5"), mpf("0.25"))), 25))

    # baskakov_kernel_log(n=6, c=2, v=3, t=0.5)
    print("log_p(6,2,3,0.5) =", mp.nstr(log(baskakov_kernel(mpf(6), mpf(2), 3, mpf("0.5"))), 25))

    # basis mass for beta=0.3, n=20, x=2 summed far past the bulk
    lam, beta = mpf(40), mpf("0.3")
    s = sum(jain_weight(v, lam, beta) for v in range(0, 600))
    print("mass(0.3,20,2; v<600) =", mp.nstr(s, 30))

    # D(e^-t) at n=100, c=1, beta=0.1, x=1.  Kernel averages two ways:
    # quadrature in t and the Tricomi-U closed form Gamma(v+a')/Gamma(a') U(v, 1-a', 1/c).
    n, c, beta, x = mpf(100), mpf(1), mpf("0.1"), mpf(1)
    f = lambda t: exp(-t)
    ap = n / c - 1
    for v in (1, 57, 140):
        q = kernel_average(n, c, v, f)
        u = gamma(v + ap) / gamma(ap) * hyperu(v, 1 - ap, 1 / c)
        print(f"  kernel avg v={v}: quad={mp.nstr(q, 25)} tricomi={mp.nstr(u, 25)}")
    mp.dps = 30
    val = jain_baskakov(n, c, beta, x, f, 420)
    print("D(exp(-t); 100,1,0.1,1) =", mp.nstr(val, 22))

    # second-order modulus of e^-t with step bound 0.1: sup at x=0, h=0.1
    print("omega2(exp-neg,0.1) =", mp.nstr((1 - exp(mpf("-0.1"))) ** 2, 25))


if __name__ == "__main__" and "--kinks" not in __import__("sys").argv:
    main()


def kink_constants():
    """Kernel averages of |t - 1| (quadrature split at the kink)."""
    mp.dps = 40
    for n, c, v in ((10, 1, 5), (100, 1, 90), (12, 2, 3)):
        n, c = mpf(n), mpf(c)
        f = lambda t: abs(t - 1)
        val = (n - c) / c * quad(lambda t: baskakov_kernel(n, c, v, t) * f(t), [0, 1, 10, mp.inf])
        print(f"E|T-1| n={n} c={c} v={v}:", mp.nstr(val, 25))


if __name__ == "__main__" and "--kinks" in __import__("sys").argv:
    kink_constants()
