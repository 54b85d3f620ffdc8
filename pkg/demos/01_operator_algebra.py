"""Product-operator algebra: the basis, exact commutators and the generator.

Run: python3 demos/01_operator_algebra.py
"""

import numpy as np

from bulknmr import adjoint_generator, build_structure_table, commute, enumerate_basis, get_basis
from bulknmr.algebra import parse_operator

# The basis for n spins has 4**n - 1 elements, ordered by rank first.
for n in range(1, 5):
    print(n, "nuclei:", len(enumerate_basis(n)), "operators")
print(get_basis(2).names())

# Commutators are single terms with dyadic coefficients, [A, B] = i f C.
pairs = [("S[1x]", "S[1y]"), ("C[1x,2y]", "C[1x,2z]"), ("C[1x,2x]", "S[1z]"), ("C[1x,2x]", "C[1y,2y]")]
for a, b in pairs:
    result = commute(parse_operator(a, 2), parse_operator(b, 2))
    terms = " + ".join(f"({c}) {op}" for op, c in result.items()) or "0"
    print(f"[{a}, {b}] = i * {terms}")

# How sparse is the table?
for n in (2, 3, 4):
    table = build_structure_table(n)
    size = len(table.basis)
    print(f"n={n}: {table.nonzero_count()} noncommuting pairs out of {size * (size - 1) // 2}")

# A Hamiltonian H = sum_l h_l B_l turns into a real sparse generator, dv/dt = A v.
# Here H = -w S_z for one spin.
w = 1.0
A = adjoint_generator(build_structure_table(1), [0.0, 0.0, -w])
print(A.toarray())

# A is antisymmetric once every row is weighted by 4**rank.
n = 3
basis = get_basis(n)
h = np.random.default_rng(0).normal(size=len(basis))
A = adjoint_generator(build_structure_table(n), h).toarray()
W = np.diag(4.0 ** basis.ranks)
print("max |W A + (W A)^T| =", np.abs(W @ A + (W @ A).T).max())
