"""Negativity and partial-transpose basics on canonical two-qubit states.

Walks the matrix kernel through the states everyone knows the answers
for: a Bell pair, a product state, and a noisy mixture.
"""

import numpy as np

from entbound import negativity, partial_transpose_A, trace_norm, eigvals_hermitian

# A Bell pair in the A-major basis |0 e0>, |0 e1>, |1 e0>, |1 e1>.
psi = np.zeros(4)
psi[0] = psi[3] = 1.0 / np.sqrt(2.0)
bell = np.outer(psi, psi)

print("Bell state:")
print("  partial transpose spectrum:", np.round(eigvals_hermitian(partial_transpose_A(bell)), 6))
print("  trace norm of rho^TA:      ", round(trace_norm(partial_transpose_A(bell)), 9))
print("  negativity:                ", round(negativity(bell), 9), "(maximally entangled -> 1)")

product = np.zeros((4, 4))
product[0, 0] = 1.0
print("\nProduct state |00><00|:")
print("  negativity:", negativity(product))

# Mixing a Bell pair with white noise: the Werner-like family loses its
# entanglement certificate at visibility 1/3.
print("\nBell pair mixed with white noise:")
for vis in (1.0, 0.6, 1.0 / 3.0, 0.2):
    rho = vis * bell + (1.0 - vis) * np.eye(4) / 4.0
    print(f"  visibility {vis:.3f}: negativity = {negativity(rho):.6f}")

# A pure state with partially overlapping branches: N = sqrt(1 - overlap^2).
print("\nBranch-overlap family (|0>|f0> + |1>|f1>)/sqrt(2) with <f0|f1> = c:")
for c in (0.0, 0.3, 0.6, 0.9):
    f1 = np.array([c, np.sqrt(1.0 - c * c)])
    v = (np.kron([1.0, 0.0], [1.0, 0.0]) + np.kron([0.0, 1.0], f1)) / np.sqrt(2.0)
    rho = np.outer(v, v)
    print(f"  c = {c:.1f}: negativity = {negativity(rho):.6f}"
          f"  (sqrt(1-c^2) = {np.sqrt(1-c*c):.6f})")
