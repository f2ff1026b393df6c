"""Sampling of Wigner-type noise, unit spikes, and spiked data matrices.

Conventions used throughout the package: a noise matrix H of size n is
symmetric (Hermitian when complex) with independent entries up to
symmetry, off-diagonal variance 1/n, and diagonal variance w2/n. A data
matrix is M = sqrt(lambda) * x x* + H for a unit-norm spike x. Normalized
moments are w2 = n E[H_ii^2], w3 = n^{3/2} E[H_ij^3], w4 = n^2 E[H_ij^4].

Everything is a pure function of its inputs and a Seed, so samples are
reproducible and safe to generate in parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

__all__ = [
    "Seed",
    "NoiseSpec",
    "SpikePrior",
    "DataMatrix",
    "sample_noise",
    "sample_spike",
    "assemble",
    "theoretical_moments",
    "matrix_text",
    "write_matrix",
    "read_matrix",
]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(z: int) -> int:
    z = (z + _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


@dataclass(frozen=True)
class Seed:
    """RNG identity. Equal (root, stream) pairs give bit-identical samples.

    child() mixes indices into the stream with splitmix64, so derived
    streams depend only on the index path, not on generation order.
    """

    root: int
    stream: int = 0

    def child(self, *indices: int) -> "Seed":
        s = self.stream & _MASK64
        for k in indices:
            s = _splitmix64(s ^ ((k & _MASK64) * _GOLDEN & _MASK64))
        return Seed(self.root, s)

    def generator(self) -> np.random.Generator:
        key = np.array([self.root & _MASK64, self.stream & _MASK64], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


_BUILTIN_MOMENTS = {
    "goe": (2.0, 3.0),
    "gue": (1.0, 2.0),
    "sech": (1.0, 5.0),
}

_FAMILIES = ("goe", "gue", "sech", "rademacher-offdiag", "custom-density")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise family plus its normalized moments.

    w3 is carried and moment-checked but no implemented statistic uses it.
    For custom-density the density object lives in the entrywise module;
    only its moments are needed here.
    """

    family: str
    w2: float
    w3: float
    w4: float
    complex: bool = False
    density: Optional[object] = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown noise family: {self.family!r}")
        if self.family == "gue" and not self.complex:
            raise ValueError("gue is a complex family; pass complex=True")
        if self.family in ("goe", "sech", "rademacher-offdiag") and self.complex:
            raise ValueError(f"{self.family} is a real family")
        if self.w2 < 0:
            raise ValueError("w2 must be nonnegative")
        if self.w4 < 1:
            raise ValueError("w4 < 1 is impossible for a unit-variance entry law")
        pinned = _BUILTIN_MOMENTS.get(self.family)
        if pinned is not None and (self.w2, self.w4) != pinned:
            raise ValueError(f"{self.family} has fixed moments w2={pinned[0]}, w4={pinned[1]}")

    @staticmethod
    def goe() -> "NoiseSpec":
        return NoiseSpec("goe", 2.0, 0.0, 3.0)

    @staticmethod
    def gue() -> "NoiseSpec":
        return NoiseSpec("gue", 1.0, 0.0, 2.0, complex=True)

    @staticmethod
    def sech() -> "NoiseSpec":
        return NoiseSpec("sech", 1.0, 0.0, 5.0)

    @staticmethod
    def rademacher(w2: float = 1.0) -> "NoiseSpec":
        # off-diagonal entries +-1/sqrt(n), so w4 = 1 exactly
        return NoiseSpec("rademacher-offdiag", w2, 0.0, 1.0)


@dataclass(frozen=True)
class DataMatrix:
    """Immutable symmetric (or Hermitian) n x n matrix."""

    n: int
    entries: np.ndarray
    complex: bool = False

    def __post_init__(self) -> None:
        a = self.entries
        if a.shape != (self.n, self.n):
            raise ValueError(f"entries must be {self.n} x {self.n}, got {a.shape}")
        if not self.complex and np.iscomplexobj(a):
            raise ValueError("complex entries in a matrix declared real")
        a.setflags(write=False)


@dataclass(frozen=True)
class SpikePrior:
    """How to draw (or supply) the unit-norm signal direction."""

    kind: str
    k: Optional[int] = None
    c: Optional[float] = None
    vector: Optional[tuple] = None
    delocalization_exponent: Optional[float] = None

    @staticmethod
    def rademacher() -> "SpikePrior":
        return SpikePrior("rademacher-iid")

    @staticmethod
    def sphere() -> "SpikePrior":
        return SpikePrior("unit-sphere-uniform")

    @staticmethod
    def sparse(k: int) -> "SpikePrior":
        if k < 1:
            raise ValueError("sparse prior needs k >= 1")
        return SpikePrior("sparse", k=k)

    @staticmethod
    def all_ones() -> "SpikePrior":
        return SpikePrior("all-ones")

    @staticmethod
    def biased(c: float) -> "SpikePrior":
        if not -1.0 <= c <= 1.0:
            raise ValueError("bias c must lie in [-1, 1]")
        return SpikePrior("biased", c=c)

    @staticmethod
    def explicit(vector) -> "SpikePrior":
        v = np.asarray(vector, dtype=float)
        return SpikePrior("explicit", vector=tuple(v.tolist()))


def _sech_sample(rng: np.random.Generator, size: int) -> np.ndarray:
    # inverse CDF of g(x) = 1/(2 cosh(pi x / 2)): x = (2/pi) log tan(pi u / 2)
    u = rng.random(size)
    u = np.clip(u, 1e-300, None)
    return (2.0 / np.pi) * np.log(np.tan(0.5 * np.pi * u))


def sample_noise(n: int, spec: NoiseSpec, seed: Seed) -> DataMatrix:
    """Draw a Wigner-type noise matrix of size n from the given family."""
    if n < 2:
        raise ValueError("n must be at least 2")
    rng = seed.generator()
    iu = np.triu_indices(n, 1)
    m_off = iu[0].size

    if spec.family == "goe":
        off = rng.standard_normal(m_off) / math.sqrt(n)
        diag = rng.standard_normal(n) * math.sqrt(2.0 / n)
    elif spec.family == "gue":
        re = rng.standard_normal(m_off)
        im = rng.standard_normal(m_off)
        off = (re + 1j * im) / math.sqrt(2 * n)
        diag = rng.standard_normal(n) / math.sqrt(n)
    elif spec.family == "sech":
        off = _sech_sample(rng, m_off) / math.sqrt(n)
        diag = _sech_sample(rng, n) / math.sqrt(n)
    elif spec.family == "rademacher-offdiag":
        off = (2.0 * rng.integers(0, 2, m_off) - 1.0) / math.sqrt(n)
        if spec.w2 == 0.0:
            diag = np.zeros(n)
        else:
            diag = (2.0 * rng.integers(0, 2, n) - 1.0) * math.sqrt(spec.w2 / n)
    else:
        raise ValueError(f"sampling is not supported for family {spec.family!r}")

    h = np.zeros((n, n), dtype=complex if spec.complex else float)
    h[iu] = off
    h = h + h.conj().T
    h[np.diag_indices(n)] = diag
    return DataMatrix(n=n, entries=h, complex=spec.complex)


def sample_spike(n: int, prior: SpikePrior, seed: Seed) -> np.ndarray:
    """Draw a unit-norm spike of dimension n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = seed.generator()
    if prior.kind == "rademacher-iid":
        return (2.0 * rng.integers(0, 2, n) - 1.0) / math.sqrt(n)
    if prior.kind == "unit-sphere-uniform":
        while True:
            v = rng.standard_normal(n)
            nrm = float(np.linalg.norm(v))
            if nrm > 0.0:
                return v / nrm
    if prior.kind == "sparse":
        if prior.k is None or prior.k > n:
            raise ValueError("sparse prior needs k <= n")
        x = np.zeros(n)
        idx = rng.choice(n, size=prior.k, replace=False)
        x[idx] = (2.0 * rng.integers(0, 2, prior.k) - 1.0) / math.sqrt(prior.k)
        return x
    if prior.kind == "all-ones":
        return np.full(n, 1.0 / math.sqrt(n))
    if prior.kind == "biased":
        signs = np.where(rng.random(n) < 0.5 * (1.0 + prior.c), 1.0, -1.0)
        return signs / math.sqrt(n)
    if prior.kind == "explicit":
        v = np.asarray(prior.vector, dtype=float)
        if v.size != n:
            raise ValueError(f"explicit spike has length {v.size}, expected {n}")
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > 1e-6:
            raise ValueError(f"explicit spike norm {nrm} is not within 1e-6 of 1")
        return v / nrm
    raise ValueError(f"unknown spike prior kind: {prior.kind!r}")


def assemble(x: np.ndarray, lam: float, h: DataMatrix) -> DataMatrix:
    """M = sqrt(lam) * x x* + H."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    x = np.asarray(x)
    if x.size != h.n:
        raise ValueError(f"spike has length {x.size} but noise is {h.n} x {h.n}")
    m = math.sqrt(lam) * np.outer(x, np.conj(x)) + h.entries
    return DataMatrix(n=h.n, entries=m, complex=h.complex)


def theoretical_moments(spec: NoiseSpec) -> tuple:
    """(w2, w4) of a built-in family."""
    if spec.family in _BUILTIN_MOMENTS:
        return _BUILTIN_MOMENTS[spec.family]
    if spec.family == "rademacher-offdiag":
        return (spec.w2, 1.0)
    raise ValueError("no closed-form moments; integrate the density instead")


def matrix_text(m: DataMatrix) -> str:
    """The matrix file format as a string.

    Line 1 is "N real" or "N complex", followed by N rows of N
    whitespace-separated values. Complex values are written "a+bi".
    LF line endings; %.17g so doubles round-trip exactly.
    """
    lines = [f"{m.n} {'complex' if m.complex else 'real'}"]
    for row in m.entries:
        if m.complex:
            lines.append(" ".join(f"{v.real:.17g}{v.imag:+.17g}i" for v in row))
        else:
            lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def write_matrix(m: DataMatrix, path: str) -> None:
    """Write matrix_text to a UTF-8 file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(matrix_text(m))


def _parse_complex(tok: str) -> complex:
    if not tok.endswith("i"):
        raise ValueError(f"bad complex value: {tok!r}")
    return complex(tok[:-1].replace("i", "j") + "j")


def read_matrix(path: str) -> DataMatrix:
    """Read the matrix file format written by write_matrix.

    The matrix is checked to be symmetric (Hermitian) to 1e-8 relative and
    then symmetrized exactly, which is a no-op for files we wrote.
    """
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2 or header[1] not in ("real", "complex"):
            raise ValueError(f"bad matrix header in {path}")
        n = int(header[0])
        is_complex = header[1] == "complex"
        rows = []
        for i in range(n):
            toks = fh.readline().split()
            if len(toks) != n:
                raise ValueError(f"row {i} has {len(toks)} values, expected {n}")
            if is_complex:
                rows.append([_parse_complex(t) for t in toks])
            else:
                rows.append([float(t) for t in toks])
    a = np.array(rows, dtype=complex if is_complex else float)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if float(np.max(np.abs(a - a.conj().T))) > 1e-8 * scale:
        raise ValueError(f"matrix in {path} is not symmetric")
    a = (a + a.conj().T) / 2
    return DataMatrix(n=n, entries=a, complex=is_complex)
