"""Coefficients B, C, D of F(u) = B u^3 - C u^4 + D u^5 for the two-maxima demo.

Profile: u(r) = c for r <= R and c*exp(-(r-R)) for r > R, with c = 1/sqrt(4*pi).
Target:  P(tau) = 4(1+sqrt5) tau^2 - 4(2+sqrt5) tau^3 + (5+sqrt5) tau^4 - tau^5,
         whose two maxima (tau = 2/sqrt5 and 2 + 2/sqrt5) both equal 128/(25 sqrt5).

The quadratic coefficient of I(t u) is fixed by the profile and lambda:
Q = (|grad u|^2 + lambda |u|^2) / 2.  Choosing kappa with Q = 4(1+sqrt5) kappa^2
and B, C, D from the u^3, u^4, u^5 moments makes I(t u) = P(kappa t) exactly.

Usage: python3 scripts/derive_quintic.py [R] [lambda]
"""

import sys

import mpmath as mp

mp.mp.dps = 40

R = mp.mpf(sys.argv[1]) if len(sys.argv) > 1 else mp.mpf("3.075")
lam = mp.mpf(sys.argv[2]) if len(sys.argv) > 2 else mp.mpf(3)
c = 1 / mp.sqrt(4 * mp.pi)


def moment(k):
    closed = 4 * mp.pi * c**k * (R**3 / 3 + R**2 / k + 2 * R / k**2 + 2 / mp.mpf(k) ** 3)
    quad = 4 * mp.pi * (
        mp.quad(lambda r: c**k * r**2, [0, R])
        + mp.quad(lambda r: (c * mp.exp(R - r)) ** k * r**2, [R, mp.inf])
    )
    assert abs(closed - quad) < mp.mpf(10) ** -30, (k, closed, quad)
    return closed


grad = 4 * mp.pi * mp.quad(lambda r: (c * mp.exp(R - r)) ** 2 * r**2, [R, mp.inf])
mass = moment(2)
m3, m4, m5 = moment(3), moment(4), moment(5)
s5 = mp.sqrt(5)
p2, p3, p4, p5 = 4 * (1 + s5), -4 * (2 + s5), 5 + s5, mp.mpf(-1)

Q = (grad + lam * mass) / 2
kappa = mp.sqrt(Q / p2)
B = -p3 * kappa**3 / m3
C = p4 * kappa**4 / m4
D = -p5 * kappa**5 / m5

print(f"R = {R}, lambda = {lam}")
print(f"int |grad u|^2 = {mp.nstr(grad, 17)}")
print(f"int u^2        = {mp.nstr(mass, 17)}")
print(f"int u^3,4,5    = {mp.nstr(m3, 17)}, {mp.nstr(m4, 17)}, {mp.nstr(m5, 17)}")
print(f"quadratic Q    = {mp.nstr(Q, 17)}")
print(f"H1 identity ||u||^2/2 - 4(1+sqrt5) = {mp.nstr((grad + mass) / 2 - p2, 17)}")
print(f"kappa          = {mp.nstr(kappa, 17)}")
print(f"B = {mp.nstr(B, 17)}")
print(f"C = {mp.nstr(C, 17)}")
print(f"D = {mp.nstr(D, 17)}")
print(f"maxima at t = {mp.nstr(2 / s5 / kappa, 12)}, {mp.nstr((2 + 2 / s5) / kappa, 12)}")
print(f"height 128/(25 sqrt5) = {mp.nstr(128 / (25 * s5), 17)}")
