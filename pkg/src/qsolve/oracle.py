"""Exact diagonalization of the periodic permutation chain.

``H = sum_i (1 - P_{i,i+1})`` on ``L`` sites (site ``L+1`` is site 1) acts on
words over ``N + M`` flavors; flavors ``N .. N+M-1`` are fermionic and the
graded permutation picks up a sign for every pair of fermions it moves past
each other.  ``H`` preserves flavor occupation numbers, so it is built one
weight sector at a time with exact integer entries.

Two reference spectra are offered for comparison with the Bethe solutions:

* :func:`new_levels` -- multiset differences along a chain of sectors (for
  ``SU(2)``, magnon number ``M`` against ``M - 1``);
* :func:`irrep_levels` -- ``H`` restricted to the highest-weight vectors of
  weight ``lambda`` (kernel of the raising operators), which isolates the
  ``d_lambda`` levels attached to a single Young diagram directly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import factorial, prod
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.linalg import null_space

from .errors import ConvergenceFailure, SectorTooLarge
from .representation import Partition

MAX_SECTOR_DIM = 100_000
MAX_DENSE_DIM = 6_000


@dataclass(frozen=True)
class SectorSpec:
    L: int
    N: int
    M: int
    occupation: tuple[int, ...]

    def __post_init__(self):
        occ = tuple(int(x) for x in self.occupation)
        if len(occ) != self.N + self.M:
            raise ValueError("one occupation number per flavor is required")
        if any(x < 0 for x in occ) or sum(occ) != self.L:
            raise ValueError(f"occupations {occ} must be non-negative and sum to L={self.L}")
        object.__setattr__(self, "occupation", occ)

    @property
    def dimension(self) -> int:
        return factorial(self.L) // prod(factorial(x) for x in self.occupation)

    def is_fermion(self, flavor: int) -> bool:
        return flavor >= self.N


@dataclass
class DenseSpectrum:
    eigenvalues: list[float]
    sector: object = None

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def to_json(self) -> dict:
        return {"sector": _sector_json(self.sector), "eigenvalues": [repr(float(x)) for x in self.eigenvalues]}


def _sector_json(sector):
    if isinstance(sector, SectorSpec):
        return {"L": sector.L, "N": sector.N, "M": sector.M, "occupation": list(sector.occupation)}
    if isinstance(sector, Partition):
        return {"partition": list(sector.parts)}
    return sector


def sector_basis(spec: SectorSpec) -> list[tuple[int, ...]]:
    """All words with the given flavor occupations, in lexicographic order."""
    if spec.dimension > MAX_SECTOR_DIM:
        raise SectorTooLarge(f"sector dimension {spec.dimension} exceeds {MAX_SECTOR_DIM}")
    word = []
    for flavor, count in enumerate(spec.occupation):
        word.extend([flavor] * count)
    return _multiset_permutations(word)


def _multiset_permutations(word: list[int]) -> list[tuple[int, ...]]:
    out = []
    counts: dict[int, int] = {}
    for x in word:
        counts[x] = counts.get(x, 0) + 1
    keys = sorted(counts)
    cur: list[int] = []

    def rec():
        if len(cur) == len(word):
            out.append(tuple(cur))
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                cur.append(k)
                rec()
                cur.pop()
                counts[k] += 1

    rec()
    return out


def _swap_sign(spec: SectorSpec, word: tuple, i: int, j: int) -> int:
    """Sign of the graded transposition of sites ``i < j``."""
    a, b = spec.is_fermion(word[i]), spec.is_fermion(word[j])
    if not (a or b):
        return 1
    between = sum(1 for k in range(i + 1, j) if spec.is_fermion(word[k]))
    exponent = (a and b) + (a + b) * between
    return -1 if exponent % 2 else 1


def sector_hamiltonian(spec: SectorSpec):
    """Sparse integer matrix of ``H`` on the sector, with its basis."""
    basis = sector_basis(spec)
    index = {w: n for n, w in enumerate(basis)}
    L = spec.L
    rows, cols, vals = [], [], []
    for n, w in enumerate(basis):
        diag = 0
        for i in range(L):
            j = (i + 1) % L
            if L == 1:
                continue
            lo, hi = min(i, j), max(i, j)
            if w[lo] == w[hi]:
                # P acts as the sign alone on equal flavors
                diag += 1 - _swap_sign(spec, w, lo, hi)
                continue
            diag += 1
            swapped = list(w)
            swapped[lo], swapped[hi] = swapped[hi], swapped[lo]
            rows.append(index[tuple(swapped)])
            cols.append(n)
            vals.append(-_swap_sign(spec, w, lo, hi))
        if diag:
            rows.append(n)
            cols.append(n)
            vals.append(diag)
    dim = len(basis)
    mat = sparse.coo_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=(dim, dim)).tocsr()
    mat.sum_duplicates()
    return mat, basis


def eigenvalues(matrix, tolerance: float = 1e-10, sector=None, sample: int = 16) -> DenseSpectrum:
    """All eigenvalues of a real symmetric matrix with a residual check."""
    dense = matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix)
    dense = dense.astype(float)
    n = dense.shape[0]
    if n == 0:
        return DenseSpectrum([], sector)
    if n > MAX_DENSE_DIM:
        raise SectorTooLarge(f"dense eigensolver limited to {MAX_DENSE_DIM}, got {n}")
    if not np.allclose(dense, dense.T):
        raise ConvergenceFailure("matrix is not symmetric")
    w, v = np.linalg.eigh(dense)
    norm = max(np.linalg.norm(dense, 2), 1.0)
    step = max(1, n // sample)
    for k in range(0, n, step):
        res = np.linalg.norm(dense @ v[:, k] - w[k] * v[:, k])
        if res > tolerance * norm:
            raise ConvergenceFailure(f"eigenpair {k} residual {res:.3e}")
    return DenseSpectrum(sorted(float(x) for x in w), sector)


def trace(matrix) -> int:
    return int(matrix.diagonal().sum())


def sector_spectrum(spec: SectorSpec, tolerance: float = 1e-10) -> DenseSpectrum:
    mat, _ = sector_hamiltonian(spec)
    return eigenvalues(mat, tolerance, spec)


def multiset_difference(big: Sequence[float], small: Sequence[float], tol: float = 1e-8) -> list[float]:
    """Remove one matching element of ``big`` (within ``tol``) per element of ``small``."""
    rest = sorted(big)
    for x in sorted(small):
        best = min(range(len(rest)), key=lambda i: abs(rest[i] - x), default=None)
        if best is None or abs(rest[best] - x) > tol:
            raise ConvergenceFailure(f"level {x} of the smaller sector is missing")
        rest.pop(best)
    return rest


def su2_sector(L: int, magnons: int) -> SectorSpec:
    return SectorSpec(L, 2, 0, (L - magnons, magnons))


def new_levels(L: int, N: int, M: int, sectors: Sequence[Sequence[int]], tol: float = 1e-8) -> dict:
    """Levels appearing for the first time along an ordered chain of sectors.

    ``sectors`` lists occupation vectors from the most to the least dominant;
    each entry maps to its spectrum minus the previous sector's spectrum.
    """
    out = {}
    prev: list[float] = []
    for occ in sectors:
        spec = SectorSpec(L, N, M, tuple(occ))
        levels = sector_spectrum(spec).eigenvalues
        out[tuple(occ)] = multiset_difference(levels, prev, tol)
        prev = levels
    return out


def su2_new_levels(L: int, tol: float = 1e-8) -> dict[int, list[float]]:
    """``{M: levels}`` for ``0 <= M <= L/2``."""
    chain = [(L - m, m) for m in range(L // 2 + 1)]
    table = new_levels(L, 2, 0, chain, tol)
    return {m: table[(L - m, m)] for m in range(L // 2 + 1)}


def irrep_levels(lam: Partition, tol: float = 1e-10) -> DenseSpectrum:
    """The ``d_lambda`` energies of the multiplet labelled by ``lam``.

    Uses ``GL(n)`` with ``n`` the number of rows: in the weight-``lam``
    sector, the highest-weight vectors are the common kernel of the raising
    operators ``E_{a,a+1}``, and ``H`` commutes with them.
    """
    n = max(lam.rows, 1)
    L = lam.weight
    occ = tuple(lam.row(a) for a in range(1, n + 1))
    spec = SectorSpec(L, n, 0, occ)
    H, basis = sector_hamiltonian(spec)
    if L == 0:
        return DenseSpectrum([0.0], lam)
    blocks = []
    for a in range(n - 1):
        target_occ = list(occ)
        target_occ[a] += 1
        target_occ[a + 1] -= 1
        if target_occ[a + 1] < 0:
            continue
        tspec = SectorSpec(L, n, 0, tuple(target_occ))
        tindex = {w: i for i, w in enumerate(sector_basis(tspec))}
        E = np.zeros((len(tindex), len(basis)))
        for j, w in enumerate(basis):
            for site, x in enumerate(w):
                if x == a + 1:
                    nw = list(w)
                    nw[site] = a
                    E[tindex[tuple(nw)], j] += 1
        blocks.append(E)
    if blocks:
        K = null_space(np.vstack(blocks))
    else:
        K = np.eye(len(basis))
    if K.shape[1] == 0:
        return DenseSpectrum([], lam)
    h = K.T @ H.toarray().astype(float) @ K
    h = (h + h.T) / 2
    return eigenvalues(h, tol, lam)


def export_json(spectra: dict, path) -> None:
    """Write ``{label: DenseSpectrum}`` as JSON multisets."""
    payload = {str(k): v.to_json() for k, v in spectra.items()}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
