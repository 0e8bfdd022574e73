#!/usr/bin/env python3
"""Independent expected values for the deflated-spectrum estimator tests.

For small fixed graphs, builds B = A - (d/n) J directly and reports the
largest-magnitude eigenvalue, which is what the power-iteration estimator
targets. Values printed here are frozen into tests/test_graph.cpp.
"""
import numpy as np


def deflated_extreme(A, d):
    n = A.shape[0]
    B = A - (d / n) * np.ones((n, n))
    ev = np.linalg.eigvalsh(B)
    return max(abs(ev[0]), abs(ev[-1]))


def cycle(n):
    A = np.zeros((n, n))
    for v in range(n):
        A[v, (v + 1) % n] = A[(v + 1) % n, v] = 1
    return A


def complete(n):
    return np.ones((n, n)) - np.eye(n)


def main():
    for n in (5, 6, 12):
        val = deflated_extreme(cycle(n), 2)
        closed = max(abs(2 * np.cos(2 * np.pi * k / n)) for k in range(1, n))
        print(f"C_{n}: numeric {val:.12f} closed-form {closed:.12f}")
    for n in (4, 8):
        print(f"K_{n}: numeric {deflated_extreme(complete(n), n - 1):.12f}")
    # Petersen: adjacency eigenvalues are 3, 1 (x5), -2 (x4); deflated -> 2.
    A = np.zeros((10, 10))
    for i in range(5):
        for j in ((i + 1) % 5, (i + 4) % 5, i + 5):
            A[i, j] = A[j, i] = 1
        for j in (5 + (i + 2) % 5, 5 + (i + 3) % 5):
            A[i + 5, j] = A[j, i + 5] = 1
    print(f"Petersen: numeric {deflated_extreme(A, 3):.12f}")


if __name__ == "__main__":
    main()
