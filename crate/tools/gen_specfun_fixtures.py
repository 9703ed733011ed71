#!/usr/bin/env python3
"""Regenerate the special-function reference tables with mpmath at 50 digits.

Usage: python3 tools/gen_specfun_fixtures.py fixtures/v1
"""
import sys
import mpmath as mp

mp.mp.dps = 50


def pump_params(dT, vT):
    om = mp.sqrt(dT**2 + 4 * vT**2)
    a = mp.mpc(0, 1) / 2 * (-dT - 2 * vT + om)
    b = mp.mpc(0, 1) / 2 * (-dT - 2 * vT - om)
    c = mp.mpc(0, -dT)
    return a, b, c


def main(out):
    sets = []
    for dT, vT in [(-5, 1), (-1, 1), (1, 5), (-5, 0.1), (-1, 5), (0.5, 2), (-2, 3)]:
        a, b, c = pump_params(mp.mpf(dT), mp.mpf(vT))
        sets.append((a, b, c))
        sets.append((a + 1, b + 1, c + 1))
    sets += [
        (mp.mpc(0.3, 0.2), mp.mpc(-0.7, 1.1), mp.mpc(1.5, -0.4)),
        (mp.mpc(1, 0), mp.mpc(1, 0), mp.mpc(2, 0)),
        (mp.mpc(0.25, -2), mp.mpc(1.5, 0.5), mp.mpc(2.5, 3)),
        (mp.mpc(-0.4, 0.9), mp.mpc(0.6, -1.3), mp.mpc(0.8, 0.1)),
    ]
    us = [-0.001, -0.05, -0.2, -0.35, -0.5, -0.7, -1.0, -1.4, -2.0, -3.0, -10.0, -55.0, -400.0, -5000.0]
    rows = 0
    with open(f"{out}/hyp2f1.csv", "w") as fh:
        fh.write("re_a,im_a,re_b,im_b,re_c,im_c,u,re_F,im_F\n")
        for a, b, c in sets:
            for u in us:
                F = mp.hyp2f1(a, b, c, mp.mpf(u))
                vals = [a.real, a.imag, b.real, b.imag, c.real, c.imag, mp.mpf(u), F.real, F.imag]
                fh.write(",".join(mp.nstr(v, 20) for v in vals) + "\n")
                rows += 1
    zs = []
    for re in [-37.3, -5.5, -0.7, 0.1, 0.5, 1.0, 2.5, 7.0, 60.0, 900.0]:
        for im in [-250.0, -3.2, -0.4, 0.3, 1.0, 5.0, 40.0]:
            zs.append(mp.mpc(re, im))
    zs += [mp.mpc(1, 0), mp.mpc(0.5, 0), mp.mpc(1, 5), mp.mpc(3.5, 0), mp.mpc(0, 5), mp.mpc(0, -0.02)]
    with open(f"{out}/ln_gamma.csv", "w") as fh:
        fh.write("re_z,im_z,re_lngamma,im_lngamma\n")
        for z in zs:
            g = mp.loggamma(z)
            fh.write(",".join(mp.nstr(v, 20) for v in [z.real, z.imag, g.real, g.imag]) + "\n")
    print(f"hyp2f1 rows: {rows}, ln_gamma rows: {len(zs)}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "fixtures/v1")
