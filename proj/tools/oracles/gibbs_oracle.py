#!/usr/bin/env python3
"""Independent reference values for the exact Boltzmann-law helpers.

Brute-force enumeration with itertools (no shared code with the library).
Frozen into tests/test_gibbs.cpp; rerun with: python3 tools/oracles/gibbs_oracle.py
"""
import math
from itertools import product

K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
PETERSEN = ([(i, (i + 1) % 5) for i in range(5)]
            + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
            + [(i, i + 5) for i in range(5)])
C12 = [(i, (i + 1) % 12) for i in range(12)]


def ising(n, edges, beta):
    logw = []
    for sigma in product((-1, 1), repeat=n):
        logw.append(beta * sum(sigma[u] * sigma[v] for u, v in edges))
    m = max(logw)
    w = [math.exp(x - m) for x in logw]
    z = math.fsum(w)
    probs = [x / z for x in w]
    return probs, m + math.log(z)


def potts(n, edges, q, beta_p):
    logw = []
    for sigma in product(range(q), repeat=n):
        logw.append(beta_p * sum(sigma[u] == sigma[v] for u, v in edges))
    m = max(logw)
    w = [math.exp(x - m) for x in logw]
    z = math.fsum(w)
    return [x / z for x in w], m + math.log(z)


# library indexing: bit v set <=> spin(v) = +1, so all-plus is the last index
p4, logz4 = ising(4, K4, 1.0)
print(f"K4 ising beta=1: log Z = {logz4:.15g}")
print(f"K4 ising beta=1: pi(all plus) = {p4[-1]:.15g}")
print(f"K4 ising beta=1: pi(one minus) = {p4[-2]:.15g}")

# conditioned on nonnegative magnetization: keep sum sigma >= 0
mask = []
for sigma in product((-1, 1), repeat=4):
    mask.append(sum(sigma) >= 0)
mass = math.fsum(p for p, keep in zip(p4, mask) if keep)
plus_cond = p4[-1] / mass
print(f"K4 ising beta=1: pi+(all plus) = {plus_cond:.15g} (kept mass {mass:.15g})")
print(f"K4 beta=0: kept configurations = {sum(mask)} of 16")

pp, logzp = ising(10, PETERSEN, 0.3)
print(f"petersen ising beta=0.3: log Z = {logzp:.15g}")
print(f"petersen ising beta=0.3: pi(all plus) = {pp[-1]:.15g}")

pc, logzc = ising(12, C12, 0.5)
print(f"C12 ising beta=0.5: log Z = {logzc:.15g}")

p3, logz3 = potts(4, K4, 3, 1.0)
print(f"K4 potts q=3 beta_p=1: log Z = {logz3:.15g}")
print(f"K4 potts q=3 beta_p=1: pi(all ones) = {p3[0]:.15g}")
