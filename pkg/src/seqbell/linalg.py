"""Small dense complex matrix helpers shared by the rest of the package."""

import numpy as np

DEFAULT_TOL = 1e-9

I2 = np.eye(2, dtype=np.complex128)
SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SY = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SZ = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def as_matrix(a) -> np.ndarray:
    """Return `a` as a finite square complex128 array, raising ValueError otherwise."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix has NaN/Inf entries")
    return m


def _same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")


def tensor(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    # same result as np.kron, without its generic-shape overhead
    n, m = a.shape[0], b.shape[0]
    return (a[:, None, :, None] * b[None, :, None, :]).reshape(n * m, n * m)


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def commutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _same_dim(a, b)
    return a @ b + b @ a


def expectation(o, rho) -> complex:
    """Tr[O rho]."""
    o, rho = as_matrix(o), as_matrix(rho)
    _same_dim(o, rho)
    return complex(np.einsum("ij,ji->", o, rho))


def state_norm(o, rho) -> float:
    """State-weighted norm sqrt(Tr[O^dag O rho]).

    `rho` may be a raw density matrix or anything with a ``matrix`` attribute.
    """
    rho = getattr(rho, "matrix", rho)
    o = as_matrix(o)
    val = expectation(dagger(o) @ o, rho).real
    # tiny negative values come from rounding on the kernel of rho
    return float(np.sqrt(max(val, 0.0)))


def operator_norm(o) -> float:
    """Spectral norm (largest singular value)."""
    o = as_matrix(o)
    if o.size == 0:
        return 0.0
    # LinAlgError from a non-converging SVD is left to propagate
    return float(np.linalg.svd(o, compute_uv=False)[0])


def is_hermitian(a, tol: float = DEFAULT_TOL) -> bool:
    a = as_matrix(a)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol)


def partial_trace(rho, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one side of a bipartite operator; keep=0 keeps A, keep=1 keeps B."""
    da, db = dims
    r = as_matrix(rho).reshape(da, db, da, db)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijil->jl", r)
    raise ValueError("keep must be 0 or 1")


def matrix_sign(h, tol: float = 0.0) -> np.ndarray:
    """Spectral sign of a Hermitian matrix; zero eigenvalues map to +1."""
    h = as_matrix(h)
    h = 0.5 * (h + dagger(h))
    w, v = np.linalg.eigh(h)
    s = np.where(w >= -tol, 1.0, -1.0)
    return (v * s) @ dagger(v)


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {
        "dim": int(m.shape[0]),
        "entries": [[float(z.real), float(z.imag)] for z in m.reshape(-1)],
    }


def matrix_from_json(obj) -> np.ndarray:
    """Inverse of :func:`matrix_to_json`.

    Also accepts a bare nested list of real numbers (row-major rows) for
    hand-written configs.
    """
    if isinstance(obj, dict):
        dim = int(obj["dim"])
        entries = obj["entries"]
        if len(entries) != dim * dim:
            raise ValueError(f"expected {dim * dim} entries, got {len(entries)}")
        flat = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
        return as_matrix(flat.reshape(dim, dim))
    return as_matrix(np.array(obj, dtype=np.complex128))
