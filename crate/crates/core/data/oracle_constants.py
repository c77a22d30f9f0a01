#!/usr/bin/env python3
"""Regenerate special_constants.txt.

Airy values come from the Maclaurin series (60 terms) and U(0, x) values from
its Laplace-type integral. Both are cross-checked against mpmath builtins.
Run from this directory: python3 oracle_constants.py > special_constants.txt
"""
import mpmath as mp

mp.mp.dps = 60
TERMS = 60


def airy_series(y):
    c1 = 1 / (mp.power(3, mp.mpf(2) / 3) * mp.gamma(mp.mpf(2) / 3))
    c2 = 1 / (mp.power(3, mp.mpf(1) / 3) * mp.gamma(mp.mpf(1) / 3))
    # f, g: even/odd power series solving y'' = t y
    f = [mp.mpf(0)] * (3 * TERMS + 3)
    g = [mp.mpf(0)] * (3 * TERMS + 3)
    f[0] = mp.mpf(1)
    g[1] = mp.mpf(1)
    for k in range(3, 3 * TERMS + 3):
        f[k] = f[k - 3] / (k * (k - 1))
        g[k] = g[k - 3] / (k * (k - 1))
    val = sum(c1 * f[k] * y**k - c2 * g[k] * y**k for k in range(len(f)))
    der = sum(k * (c1 * f[k] - c2 * g[k]) * y ** (k - 1) for k in range(1, len(f)))
    return val, der


def u0_integral(x):
    # U(0,x) = exp(-x^2/4)/sqrt(pi) * int_0^inf t^{-1/2} exp(-t^2/2 - x t) dt
    pre = mp.exp(-x * x / 4) / mp.sqrt(mp.pi)
    i0 = mp.quad(lambda t: t ** mp.mpf(-0.5) * mp.exp(-t * t / 2 - x * t), [0, 1, mp.inf])
    i1 = mp.quad(lambda t: t ** mp.mpf(0.5) * mp.exp(-t * t / 2 - x * t), [0, 1, mp.inf])
    return pre * i0, -x / 2 * pre * i0 - pre * i1


def v(s):
    u, du = u0_integral(mp.sqrt(2) * s)
    return u, mp.sqrt(2) * du


def check(a, b, what):
    assert abs(a - b) < mp.mpf(10) ** -25 * max(1, abs(b)), (what, a, b)


rows = []
for y, tag in [(0, "0"), (mp.mpf("1.7"), "1.7"), (-5, "-5"), (5, "5")]:
    a, da = airy_series(mp.mpf(y))
    check(a, mp.airyai(y), "Ai")
    check(da, mp.airyai(y, derivative=1), "Ai'")
    rows.append((f"ai({tag})", a))
    rows.append((f"ai_prime({tag})", da))
for s, tag in [(0, "0"), (mp.mpf("0.9"), "0.9"), (3, "3"), (6, "6")]:
    val, der = v(mp.mpf(s))
    check(val, mp.pcfu(0, mp.sqrt(2) * s), "U")
    rows.append((f"v({tag})", val))
    rows.append((f"v_prime({tag})", der))
star = mp.findroot(lambda s: v(s)[0] - 1, mp.mpf("0.2"))
rows.append(("v_threshold", star))

print("# name value (20 significant digits); generated by oracle_constants.py")
for name, val in rows:
    print(f"{name} {mp.nstr(val, 20, min_fixed=-5, max_fixed=5)}")
