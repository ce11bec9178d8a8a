"""Matrix model of the Teichmuller scalar action on torsion lattices.

A generator zeta of mu_{q-1} acts on the rank-h_r torsion lattice of a
full-height group semilinearly; in the right basis (pairs ordered reverse
dictionary, so the last index varies slowest) the matrix is block diagonal
with n copies of the m x m cyclic shift, where m is the degree of the
multiplier field over the base and n = h_r / m.  Everything here is small
exact integer linear algebra over that matrix: the circulant test for a
commuting block, the commutant dimension n^2 m, and the unit-filtration
quotient orders that the torsion degrees have to match.
"""

import math

import numpy as np


def _cyclic_shift(m: int):
    """The m x m permutation matrix with first row 0..0 1 and ones below
    the diagonal.  Its m-th power is the identity."""
    A = np.zeros((m, m), dtype=np.int64)
    A[0, m - 1] = 1
    for i in range(1, m):
        A[i, i - 1] = 1
    return A


class BlockMatrixSpec:
    """Block-diagonal model: n diagonal copies of the m x m cyclic shift."""

    def __init__(self, m: int, n: int):
        if m < 1 or n < 1:
            raise ValueError("block sizes must be positive")
        self.m = m
        self.n = n
        self.size = m * n
        self.block = _cyclic_shift(m)
        self.matrix = np.kron(np.eye(n, dtype=np.int64), self.block)

    def __repr__(self):
        return f"BlockMatrixSpec(m={self.m}, n={self.n})"


def build_phi_zeta(m: int, n: int) -> BlockMatrixSpec:
    """Matrix of the zeta action: n diagonal blocks, each the m-cycle."""
    return BlockMatrixSpec(m, n)


def check_relations(Y) -> bool:
    """Does the m x m block Y commute with the cyclic shift?

    Two independent tests: the matrix identity AY = YA, and the circulant
    pattern y[r][r+i] constant in r for each wrapped offset i.  They are
    equivalent for any coefficient ring; disagreement is a bug, not a
    verdict.
    """
    Y = np.asarray(Y, dtype=object)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValueError("expected a square matrix")
    m = Y.shape[0]
    A = _cyclic_shift(m).astype(object)
    commutes = bool(np.array_equal(A @ Y, Y @ A))
    circulant = all(
        Y[r][(r + i) % m] == Y[0][i % m]
        for i in range(m)
        for r in range(1, m)
    )
    if commutes != circulant:
        raise AssertionError("circulant test disagrees with commutation")
    return commutes


def _rank_unit_pivots(M, mod: int) -> int:
    """Row reduce over Z/mod using unit pivots only; returns pivot count.

    For prime mod this is plain Gaussian elimination."""
    M = np.array(M, dtype=np.int64) % mod
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if math.gcd(int(M[i, c]), mod) == 1:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            M[[r, piv]] = M[[piv, r]]
        M[r] = (M[r] * pow(int(M[r, c]), -1, mod)) % mod
        for i in range(rows):
            if i != r and M[i, c]:
                M[i] = (M[i] - M[i, c] * M[r]) % mod
        r += 1
        if r == rows:
            break
    return r


def commutant_dimension(spec: BlockMatrixSpec, p: int = 3) -> int:
    """Dimension over F_p of the space of matrices commuting with spec.

    Solves X phi = phi X as a Sylvester-style system on the h_r^2 matrix
    entries and returns the kernel dimension, which equals n^2 m for these
    block-cyclic matrices: each of the n^2 blocks of a commuting matrix is
    free to be any polynomial in the m-cycle.  The system has integer
    entries and unit pivots, so the residue rank equals the generic rank;
    that equality is asserted by recomputing with unit pivots mod p^2.
    """
    Phi = spec.matrix
    h = spec.size
    eye = np.eye(h, dtype=np.int64)
    M = np.kron(Phi.T, eye) - np.kron(eye, Phi)
    r = _rank_unit_pivots(M, p)
    r2 = _rank_unit_pivots(M, p * p)
    if r != r2:
        raise AssertionError("residue rank differs from rank mod p^2")
    return h * h - r


def unit_quotient_order(q_h: int, n: int) -> int:
    """Order of the quotient of principal units U_0 / U_n in the field with
    residue size q_h: (q_h - 1) q_h^(n-1).  Matches the certified degree of
    the level-n torsion field of a full-height group."""
    if n < 1:
        raise ValueError("level must be positive")
    return (q_h - 1) * q_h ** (n - 1)
