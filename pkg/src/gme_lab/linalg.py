"""Dense complex linear algebra over multipartite Hilbert spaces.

Operators are stored as plain numpy arrays together with the ordered list of
subsystem dimensions.  The basis convention is most-significant-first: the
composite index of |i_1 ... i_N> is sum_k i_k * prod_{m>k} d_m, which is
exactly the ordering produced by ``numpy.kron``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Package-wide tolerances.  Double precision with dense matrices up to ~1000
# dimensions leaves at least four digits of headroom against all of these.
TAU_HERM = 1e-12    # absolute deviation from Hermiticity (scaled by max entry)
TAU_TRACE = 1e-12   # deviation of the trace from 1 for normalized operators
TAU_PSD = 1e-10     # most negative eigenvalue tolerated, relative to trace
TAU_EIG = 1e-10     # relative accuracy contract for Hermitian eigenvalues


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense Hermitian operator on an ordered tensor product of subsystems.

    ``normalized`` asserts unit trace and ``state`` asserts positive
    semidefiniteness; both are checked at construction.  Unnormalized or
    indefinite operators (witnesses, partial transposes, unnormalized
    projections) are first class: construct them with the matching flag off.
    Normalization is always an explicit flag, never implied.
    """

    mat: np.ndarray
    dims: tuple[int, ...]
    normalized: bool = True
    state: bool = True

    def __post_init__(self):
        mat = np.array(self.mat, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        d = int(np.prod(self.dims))
        if mat.ndim != 2 or mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match dims {self.dims}")
        if any(dim < 2 for dim in self.dims):
            raise ValueError("every subsystem dimension must be at least 2")
        scale = max(1.0, float(np.abs(mat).max()))
        if float(np.abs(mat - mat.conj().T).max()) > TAU_HERM * scale:
            raise ValueError("matrix is not Hermitian within tolerance")
        if self.normalized and abs(self.trace - 1.0) > TAU_TRACE:
            raise ValueError(f"trace {self.trace} is not 1 within tolerance")
        if self.state:
            lo = float(np.linalg.eigvalsh(mat)[0])
            if lo < -TAU_PSD * max(abs(self.trace), 1.0):
                raise ValueError(f"operator is not PSD: min eigenvalue {lo}")

    @property
    def trace(self) -> float:
        return float(np.trace(self.mat).real)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product; subsystem lists concatenate and traces multiply."""
    return DensityMatrix(
        np.kron(a.mat, b.mat),
        a.dims + b.dims,
        normalized=a.normalized and b.normalized,
        state=a.state and b.state,
    )


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Componentwise (Schur) product of two equal-shape matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def _check_subsystems(dm: DensityMatrix, subsystems: Iterable[int]) -> list[int]:
    subs = sorted(set(int(s) for s in subsystems))
    for s in subs:
        if s < 0 or s >= dm.n_subsystems:
            raise ValueError(f"subsystem index {s} out of range for dims {dm.dims}")
    return subs


def partial_transpose(dm: DensityMatrix, subsystems: Iterable[int]) -> DensityMatrix:
    """Transpose the listed tensor factors.

    Hermiticity and the trace are preserved; positivity is not, so the result
    is flagged unnormalized with PSD unknown.
    """
    subs = _check_subsystems(dm, subsystems)
    n = dm.n_subsystems
    t = dm.mat.reshape(dm.dims + dm.dims)
    axes = list(range(2 * n))
    for s in subs:
        axes[s], axes[n + s] = axes[n + s], axes[s]
    out = t.transpose(axes).reshape(dm.dim, dm.dim)
    return DensityMatrix(out, dm.dims, normalized=False, state=False)


def partial_trace(dm: DensityMatrix, discard: Iterable[int]) -> DensityMatrix:
    """Trace out the listed subsystems; the total trace is preserved."""
    subs = _check_subsystems(dm, discard)
    keep = [i for i in range(dm.n_subsystems) if i not in subs]
    if not keep:
        raise ValueError("cannot discard every subsystem")
    t = dm.mat.reshape(dm.dims + dm.dims)
    dims = list(dm.dims)
    for s in reversed(subs):
        t = np.trace(t, axis1=s, axis2=s + len(dims))
        dims.pop(s)
    d = int(np.prod(dims))
    return DensityMatrix(t.reshape(d, d), tuple(dims),
                         normalized=dm.normalized, state=dm.state)


def permute_subsystems(dm: DensityMatrix, perm: Sequence[int]) -> DensityMatrix:
    """Relabel subsystems so that new position i holds old subsystem perm[i].

    A pure basis change: the spectrum is invariant and applying the inverse
    permutation restores the input exactly.
    """
    perm = [int(p) for p in perm]
    n = dm.n_subsystems
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    t = dm.mat.reshape(dm.dims + dm.dims)
    t = t.transpose(perm + [n + p for p in perm])
    new_dims = tuple(dm.dims[p] for p in perm)
    return DensityMatrix(t.reshape(dm.dim, dm.dim), new_dims,
                         normalized=dm.normalized, state=dm.state)


def min_eigenvalue_hermitian(m: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    m = np.asarray(m, dtype=complex)
    scale = max(1.0, float(np.abs(m).max()))
    if float(np.abs(m - m.conj().T).max()) > TAU_HERM * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return float(np.linalg.eigvalsh(m)[0])


def density_matrix_to_json(dm: DensityMatrix) -> dict:
    """Serialize to ``{"dims": [...], "re": [[...]], "im": [[...]]}`` (row-major)."""
    return {
        "dims": list(dm.dims),
        "re": dm.mat.real.tolist(),
        "im": dm.mat.imag.tolist(),
    }


def density_matrix_from_json(obj: dict, normalized: bool = True,
                             state: bool = True) -> DensityMatrix:
    mat = np.array(obj["re"], dtype=float) + 1j * np.array(obj["im"], dtype=float)
    return DensityMatrix(mat, tuple(obj["dims"]), normalized=normalized, state=state)
