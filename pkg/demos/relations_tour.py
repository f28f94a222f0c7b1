"""
A first tour of linear relations
================================

A linear relation is a subspace of H x K.  Unlike a matrix it may send a
point to a whole affine set (its multivalued part) and may be defined on a
proper subspace only.  Run with ``python demos/relations_tour.py``.
"""
import numpy as np

import relcalc as rc

np.set_printoptions(precision=4, suppress=True)

# %% an operator with a kernel, and its inverse relation
A = np.diag([2.0, 0.0])
T = rc.from_graph(A)
print("T = graph(diag(2, 0)), part dims (D, R, N, M):",
      (T.domain.rank, T.range.rank, T.kernel.rank, T.mulpart.rank))

Tinv = rc.inverse(T)
print("T^-1 is multivalued: dim M(T^-1) =", Tinv.mulpart.rank)

# the image of a point under T^-1 is a coset: minimum-norm solution + N(T)
coset = rc.preimage_of(T, np.array([4.0, 0.0]))
print("T^-1 (4, 0) =", coset.particular, "+ span", coset.direction.basis.T)

# %% adjoints, orthogonal complements, and the operator part
S = rc.from_parts(
    A_op=np.array([[1.0], [1.0], [0.0]]),
    domain_basis=np.array([[1.0], [0.0]]),
    mul_generators=[np.array([0.0, 0.0, 1.0])],
)
Sa = rc.adjoint(S)
print("\nS: D(S) = span(e1), M(S) = span(e3)")
print("N(S*) equals R(S)^perp:", rc.subspace.equals(Sa.kernel, rc.complement(S.range)))
print("M(S*) equals D(S)^perp:", rc.subspace.equals(Sa.mulpart, rc.complement(S.domain)))
print("S** equals S:", rc.relations_equal(rc.adjoint(Sa), S))

op = rc.regular_part(S)
print("operator part of S on D(S):\n", op.full_matrix)
print("S rebuilt from operator part and multivalued part:", rc.relations_equal(rc.reconstruct(S), S))

# %% composition and sums stay inside the class of relations
R = rc.compose(Tinv, T)
print("\nT^-1 T: dim D =", R.domain.rank, " dim M =", R.mulpart.rank,
      "(the kernel of T reappears as multivalued part)")
print("T + T^-1 graph dim:", rc.relation_sum(T, Tinv).graph.rank)

# %% eigenvalues of a square relation, including infinite ones
sigma = rc.point_spectrum(T)
print("\npoint spectrum of T:", sigma.eigenvalues, " infinite:", sigma.infinite_count)
sigma = rc.point_spectrum(Tinv)
print("point spectrum of T^-1:", sigma.eigenvalues, " infinite:", sigma.infinite_count)
