#!/usr/bin/env python3
"""Regenerates tests/oracle_values.hpp from arbitrary-precision evaluations.

Trajectories are evaluated with mpmath.expm of the 2x2 system matrix and crossing
times with mpmath.findroot, so the values are independent of the closed forms
used by the library.
"""

import pathlib

import mpmath as mp

mp.mp.dps = 40


def ext_exp(tau):
    tau = mp.mpf(tau)
    if tau < mp.mpf(1) / 2:
        y = mp.sqrt(1 - 4 * tau**2)
        return ((1 + y) / (1 - y)) ** (1 / (2 * y))
    z = mp.sqrt(4 * tau**2 - 1)
    return mp.exp(mp.atan(z) / z)


def traj(k, c, beta, start):
    k, c, beta = mp.mpf(k), mp.mpf(c), mp.mpf(beta)
    a = mp.matrix([[0, -k * c], [1, -beta]])
    eq = mp.matrix([beta / c, 1 / c])
    x0 = mp.matrix([start[0], start[1]]) - eq

    def at(t):
        return eq + mp.expm(a * t) * x0

    return at


def decay(k, c, beta):
    gap = 4 * mp.mpf(k) * c - mp.mpf(beta) ** 2
    return mp.exp(-mp.pi * beta / mp.sqrt(gap)) if gap > 0 else mp.mpf(0)


def gain(k, c, beta):
    return mp.mpf(1) if beta == 0 else ext_exp(mp.sqrt(mp.mpf(k) * c) / beta)


def weak_margin(k, c, bmin, bmax):
    lhs = (bmax - bmin) * (1 + decay(k, c, bmin)) / gain(k, c, bmax)
    rhs = mp.sqrt(k * c) * (1 - decay(k, c, bmax) * decay(k, c, bmin))
    return rhs - lhs


def medium_margin(k, c, bmin, bmax):
    return mp.sqrt(k * c) * gain(k, c, bmax) - (bmax - bmin) * (1 + decay(k, c, bmin))


def ws_weak_margin(k, c, bmin, bmax, rho_max):
    scale = mp.sqrt(k * c) * (1 - c / mp.mpf(rho_max)) * gain(k, c, bmax)
    return scale * (1 - decay(k, c, bmax) * decay(k, c, bmin)) / (1 + decay(k, c, bmin)) - (bmax - bmin)


def first_root(f, t_hi, step, lo):
    """Largest root of f below t_hi found by scanning, then polished by findroot."""
    t = t_hi
    fa = f(t)
    while t > lo:
        tn = t - step
        fb = f(tn)
        if fa * fb < 0:
            return mp.findroot(f, (tn, t), solver="anderson")
        t, fa = tn, fb
    raise RuntimeError("no root")


def closed_anchors(k, c, bmin, bmax, q_floor=0):
    """Anchors of the closed construction by direct numerical crossing search."""
    k, c = mp.mpf(k), mp.mpf(c)
    start = (bmax * q_floor, mp.mpf(q_floor))
    leg1 = traj(k, c, bmax, start)
    step = mp.mpf(1) / 200
    t1 = first_root(lambda t: leg1(t)[1] - 1 / c, -step / 10, step, -100)
    p1 = leg1(t1)[0]
    leg2 = traj(k, c, bmin, (p1, 1 / c))
    t2 = first_root(lambda t: leg2(t)[1] - 1 / c, -step / 10, step, -100)
    p2 = leg2(t2)[0]
    ta = mp.findroot(lambda t: leg2(t)[0] - bmin * leg2(t)[1], (t2 + step, -step), solver="anderson")
    q_star = leg2(ta)[1]
    leg3 = traj(k, c, bmax, (p2, 1 / c))
    t3 = first_root(lambda t: leg3(t)[1] - q_floor, -step / 10, step, -100)
    p3 = leg3(t3)[0]
    return dict(p1=p1, p2=p2, p3=p3, t1=t1, t2=t2, t3=t3, q_star=q_star)


def fmt(x):
    return mp.nstr(x, 20, min_fixed=-30, max_fixed=30)


def main():
    vals = {}
    vals["kExtExpTau03"] = ext_exp(mp.mpf("0.3"))
    # tau > 1/2 branch continued analytically: z = i y, atan(i y)/(i y) = atanh(y)/y
    y = mp.sqrt(1 - 4 * mp.mpf("0.3") ** 2)
    vals["kExtExpTau03Continued"] = mp.exp(mp.re(mp.atan(1j * y) / (1j * y)))

    # Medium example: k = 0.5, c = 1, psi in [0.25, 1.5]
    vals["kMediumMargin"] = medium_margin(0.5, 1, mp.mpf("0.25"), mp.mpf("1.5"))
    # Fig. 1(a) weak margin
    vals["kWeakMargin"] = weak_margin(0.5, 1, mp.mpf("0.25"), mp.mpf("0.75"))
    # Root of the weak margin in beta_max with beta_min = 0.25 fixed
    root = mp.findroot(lambda b: weak_margin(0.5, 1, mp.mpf("0.25"), b), (mp.mpf("0.8"), mp.mpf("1.4")),
                       solver="anderson")
    vals["kWeakMarginRootBetaMax"] = root
    # Weakly singular margins, k = 4, c = 1, ||psi|| = 2, rho in [0, 2]
    vals["kWsMarginGamma095"] = ws_weak_margin(4, 1, mp.mpf("1.9"), mp.mpf("2.1"), 2)
    vals["kWsMarginGamma05"] = ws_weak_margin(4, 1, mp.mpf(1), mp.mpf(3), 2)

    a = closed_anchors(0.5, 1, mp.mpf("0.25"), mp.mpf("0.75"))
    for key, v in a.items():
        vals["kWeak_" + key] = v
    a = closed_anchors(4, 1, mp.mpf("1.9"), mp.mpf("2.1"), q_floor=mp.mpf("0.5"))
    for key, v in a.items():
        vals["kWeaklySingular_" + key] = v
    a = closed_anchors(0.5, 1, mp.mpf("0.25"), mp.mpf("1.5"))
    for key, v in a.items():
        vals["kMedium_" + key] = v

    # |x|^(-1/2) on the torus: psi*(y) = sqrt(2/y)
    vals["kInvSqrtL1"] = 2 * mp.sqrt(2)
    vals["kInvSqrtGamma"] = mp.quad(lambda t: mp.sqrt(2 / t), [mp.mpf(1) / 2, 1])

    out = pathlib.Path(__file__).resolve().parent.parent / "oracle_values.hpp"
    lines = [
        "#pragma once",
        "",
        "// Generated by tests/oracles/generate_oracles.py (mpmath, 40 digits). Do not edit.",
        "",
        "namespace oracle {",
        "",
    ]
    for key, v in vals.items():
        lines.append(f"inline constexpr double {key} = {fmt(v)};")
    lines += ["", "}  // namespace oracle", ""]
    out.write_text("\n".join(lines))
    print(out.read_text())


if __name__ == "__main__":
    main()
