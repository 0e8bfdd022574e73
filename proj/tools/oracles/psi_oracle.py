#!/usr/bin/env python3
"""Independent reference values for the pmf / convolution / tail checks.

Computes, with plain linear-space numpy convolutions and a multinomial
decomposition (deliberately different algorithms than the library's
log-sum-exp convolution and saturating joint DP):

  * q-fold convolution point-mass margins against f_q * psi_k
  * upper-tail margins against sqrt(2) * q * psi_k (per coordinate)
  * the joint "two active coordinates" tail ratio max over (k,l)

Frozen into tests/test_psi.cpp; rerun with: python3 tools/oracles/psi_oracle.py
"""
import math

import numpy as np

D, G0, G1 = 7, 10.0, 2.0
KMAX = 200  # pmf truncation
KCHK = 50   # checked range of k


def psi_masses():
    m = np.zeros(KMAX + 1)
    for k in range(1, KMAX + 1):
        m[k] = k ** -2.0 * D ** (-G0 - G1 * k)
    # geometric bound on the mass beyond the truncation (underflows here)
    tail = (KMAX + 1) ** -2.0 * D ** (-G0 - G1 * (KMAX + 1)) / (1 - D ** -G1)
    m[0] = 1.0 - (math.fsum(m[1:]) + tail)
    return m


psi = psi_masses()
print(f"psi0 = {psi[0]:.15g}")
print(f"log psi1 = {math.log(psi[1]):.15g}")
print(f"sum_{{k>=1}} psi_k = {math.fsum(psi[1:]):.15g}")


def conv_power(base, q):
    c = np.array([1.0])
    for _ in range(q):
        c = np.convolve(c, base)
    return c


def f_q(q):
    return math.fsum((1 + 16 * D ** -G0) ** i for i in range(q))


print("\n-- point-mass convolution margins: log(f_q psi_k) - log P(S_q = k) --")
for q in (1, 2, 7):
    c = conv_power(psi, q)
    margins = [math.log(f_q(q) * psi[k]) - math.log(c[k])
               for k in range(1, KCHK + 1)]
    kmin = 1 + int(np.argmin(margins))
    print(f"q={q}: f_q={f_q(q):.15g} min_margin={min(margins):.12g} at k={kmin}")
    if q == 2:
        print(f"q=2: log conv[1] = {math.log(c[1]):.15g}  "
              f"(log 2 psi0 psi1 = {math.log(2 * psi[0] * psi[1]):.15g})")

print("\n-- coordinate tail margins: log(sqrt(2) q psi_k) - log P(S_q >= k) --")
for q in (2, 7):
    c = conv_power(psi, q)
    tails = [math.fsum(c[k:]) for k in range(KCHK + 1)]
    margins = [math.log(math.sqrt(2) * q * psi[k]) - math.log(tails[k])
               for k in range(KCHK + 1)]
    kmin = int(np.argmin(margins))
    print(f"q={q}: min_margin={min(margins):.12g} at k={kmin}  "
          f"log_tail(1)={math.log(tails[1]):.15g}")

# joint event: J >= 2 pairs with both coordinates >= 1, and both coordinate
# sums large.  Decompose over the activity pattern of the q draws: each draw
# is (a,b) = (1{Y>=1}, 1{Y'>=1}) with the four cells independent across draws,
# and conditionally on its activity a coordinate is either 0 or a draw from
# psi conditioned on >= 1.
s = math.fsum(psi[1:])
psip = psi.copy()
psip[0] = 0.0
psip /= s
cond_pow = [np.array([1.0])]
for _ in range(7):
    cond_pow.append(np.convolve(cond_pow[-1], psip))


def cond_tail(m, k):
    return math.fsum(cond_pow[m][k:]) if k <= len(cond_pow[m]) - 1 else 0.0


def joint_lhs(q):
    lhs = np.zeros((KCHK + 1, KCHK + 1))
    p11 = s * s
    p10 = p01 = s * (1 - s)
    p00 = (1 - s) * (1 - s)
    for n11 in range(2, q + 1):
        for n10 in range(0, q - n11 + 1):
            for n01 in range(0, q - n11 - n10 + 1):
                n00 = q - n11 - n10 - n01
                coef = (math.factorial(q)
                        // (math.factorial(n00) * math.factorial(n01)
                            * math.factorial(n10) * math.factorial(n11)))
                w = coef * p11 ** n11 * p10 ** n10 * p01 ** n01 * p00 ** n00
                t1 = np.array([cond_tail(n10 + n11, k) for k in range(KCHK + 1)])
                t2 = np.array([cond_tail(n01 + n11, k) for k in range(KCHK + 1)])
                lhs += w * np.outer(t1, t2)
    return lhs


M = psi[0] + D ** -G0 * math.fsum(k ** -2.0 for k in range(1, 20001))
print("\n-- joint two-active-coordinate tail --")
print(f"M = E[d^(G1 Y)] = {M:.15g}")
for q in (2, 7):
    lhs = joint_lhs(q)
    best = (-math.inf, None)
    for k in range(KCHK + 1):
        for l in range(KCHK + 1):
            if lhs[k][l] > 0:
                r = math.log(lhs[k][l]) - math.log(psi[k + 1]) - math.log(psi[l + 1])
                if r > best[0]:
                    best = (r, (k, l))
    c1 = 64 * M ** q * q ** 2 * D ** (G1 - G0) / (1 - D ** -G1)
    print(f"q={q}: log_max_ratio={best[0]:.12g} at (k,l)={best[1]}  "
          f"c1^2={c1 * c1:.12g}  min_margin={math.log(c1 * c1) - best[0]:.12g}")
    print(f"q={q}: log lhs[0][0] = {math.log(lhs[0][0]):.15g}")

# the d^-20 constant from the large-exponent regime (G1 >= 100) is false at
# these scaled exponents: demonstrate
lhs7 = joint_lhs(7)
viol = math.log(lhs7[2][2]) - (-20 * math.log(D) + math.log(psi[3]) + math.log(psi[3]))
print(f"\nd^-20 bound at q=7,(k,l)=(2,2): log excess = {viol:.12g} (positive => false)")
