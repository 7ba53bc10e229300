"""Classical bounded symmetric domains in Harish-Chandra coordinates.

A domain is described by an immutable :class:`DomainSpec`.  Points are flat
complex vectors of length ``dim``; every irreducible factor also has a matrix
view (``p x q`` for type I, antisymmetric ``n x n`` for type II, symmetric
``n x n`` for type III, a plain vector for type IV).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterator, Sequence

import numpy as np
from scipy import optimize

from . import kernels

__all__ = [
    "DomainError",
    "DomainSpec",
    "TangentVector",
    "to_matrix",
    "from_matrix",
    "basis_matrices",
    "split",
    "spectral_values",
    "generic_norm",
    "log_generic_norm",
    "contains",
    "bergman_kernel",
    "boundary_distance",
    "DISK_VOLUME",
]

DISK_VOLUME = np.pi

_IRREDUCIBLE = ("I", "II", "III", "IV")


class DomainError(ValueError):
    """Raised for malformed domains, dimension mismatches and exterior points."""


@dataclass(frozen=True)
class DomainSpec:
    """A classical bounded symmetric domain or a finite product of them.

    Use the constructors :meth:`type_i`, :meth:`type_ii`, :meth:`type_iii`,
    :meth:`type_iv`, :meth:`polydisk`, :meth:`product` (or :meth:`disk`)
    rather than the raw fields.
    """

    kind: str
    p: int = 0
    q: int = 0
    n: int = 0
    r: int = 0
    factors: tuple["DomainSpec", ...] = ()

    def __post_init__(self) -> None:
        k = self.kind
        if k == "I":
            if not 1 <= self.p <= self.q:
                raise DomainError(f"type I needs 1 <= p <= q, got p={self.p}, q={self.q}")
        elif k == "II":
            if self.n < 2:
                raise DomainError(f"type II needs n >= 2, got {self.n}")
        elif k == "III":
            if self.n < 1:
                raise DomainError(f"type III needs n >= 1, got {self.n}")
        elif k == "IV":
            if self.n < 3:
                raise DomainError(f"type IV needs n >= 3, got {self.n}")
        elif k == "polydisk":
            if self.r < 1:
                raise DomainError(f"polydisk needs r >= 1, got {self.r}")
        elif k == "product":
            if not self.factors:
                raise DomainError("product needs at least one factor")
        else:
            raise DomainError(f"unknown domain kind {k!r}")

    # constructors
    @classmethod
    def type_i(cls, p: int, q: int) -> "DomainSpec":
        return cls("I", p=p, q=q)

    @classmethod
    def type_ii(cls, n: int) -> "DomainSpec":
        return cls("II", n=n)

    @classmethod
    def type_iii(cls, n: int) -> "DomainSpec":
        return cls("III", n=n)

    @classmethod
    def type_iv(cls, n: int) -> "DomainSpec":
        return cls("IV", n=n)

    @classmethod
    def polydisk(cls, r: int) -> "DomainSpec":
        return cls("polydisk", r=r)

    @classmethod
    def disk(cls) -> "DomainSpec":
        """The unit disk, realized as type I(1,1)."""
        return cls("I", p=1, q=1)

    @classmethod
    def product(cls, factors: Sequence["DomainSpec"]) -> "DomainSpec":
        return cls("product", factors=tuple(factors))

    # derived data
    @property
    def irreducible(self) -> bool:
        return self.kind in _IRREDUCIBLE

    @property
    def is_disk(self) -> bool:
        return self.kind == "I" and self.p == 1 and self.q == 1

    @cached_property
    def dim(self) -> int:
        k = self.kind
        if k == "I":
            return self.p * self.q
        if k == "II":
            return self.n * (self.n - 1) // 2
        if k == "III":
            return self.n * (self.n + 1) // 2
        if k == "IV":
            return self.n
        if k == "polydisk":
            return self.r
        return sum(f.dim for f in self.factors)

    @cached_property
    def rank(self) -> int:
        k = self.kind
        if k == "I":
            return self.p
        if k == "II":
            return self.n // 2
        if k == "III":
            return self.n
        if k == "IV":
            return 2
        if k == "polydisk":
            return self.r
        return sum(f.rank for f in self.factors)

    @property
    def genus(self) -> int:
        """Genus p(Omega)+2 of an irreducible domain.

        Reducible domains carry one genus per factor; see :attr:`genera`.
        """
        k = self.kind
        if k == "I":
            return self.p + self.q
        if k == "II":
            return 2 * (self.n - 1)
        if k == "III":
            return self.n + 1
        if k == "IV":
            return self.n
        raise DomainError("genus is per-factor data for reducible domains; use .genera")

    @property
    def genera(self) -> tuple[int, ...]:
        return tuple(f.genus for f, _ in self.factor_slices())

    @property
    def is_tube_type(self) -> bool:
        k = self.kind
        if k == "I":
            return self.p == self.q
        if k == "II":
            return self.n % 2 == 0
        if k in ("III", "IV", "polydisk"):
            return True
        return all(f.is_tube_type for f in self.factors)

    def factor_slices(self) -> list[tuple["DomainSpec", slice]]:
        """Irreducible factors with their coordinate slices (polydisks split into disks)."""
        out: list[tuple[DomainSpec, slice]] = []
        self._collect(0, out)
        return out

    def _collect(self, offset: int, out: list) -> int:
        if self.irreducible:
            out.append((self, slice(offset, offset + self.dim)))
            return offset + self.dim
        if self.kind == "polydisk":
            disk = DomainSpec.disk()
            for j in range(self.r):
                out.append((disk, slice(offset + j, offset + j + 1)))
            return offset + self.r
        for f in self.factors:
            offset = f._collect(offset, out)
        return offset

    # serialization
    def to_dict(self) -> dict[str, Any]:
        k = self.kind
        if k == "I":
            return {"kind": "I", "p": self.p, "q": self.q}
        if k in ("II", "III", "IV"):
            return {"kind": k, "n": self.n}
        if k == "polydisk":
            return {"kind": "polydisk", "r": self.r}
        return {"kind": "product", "factors": [f.to_dict() for f in self.factors]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DomainSpec":
        if not isinstance(data, dict) or "kind" not in data:
            raise DomainError(f"domain JSON must be an object with a 'kind' field: {data!r}")
        kind = data["kind"]
        allowed = {
            "I": {"kind", "p", "q"},
            "II": {"kind", "n"},
            "III": {"kind", "n"},
            "IV": {"kind", "n"},
            "polydisk": {"kind", "r"},
            "product": {"kind", "factors"},
        }
        if kind not in allowed:
            raise DomainError(f"unknown domain kind {kind!r}")
        extra = set(data) - allowed[kind]
        missing = allowed[kind] - set(data)
        if extra:
            raise DomainError(f"unknown fields for kind {kind!r}: {sorted(extra)}")
        if missing:
            raise DomainError(f"missing fields for kind {kind!r}: {sorted(missing)}")
        if kind == "I":
            return cls.type_i(int(data["p"]), int(data["q"]))
        if kind in ("II", "III", "IV"):
            return cls(kind, n=int(data["n"]))
        if kind == "polydisk":
            return cls.polydisk(int(data["r"]))
        return cls.product([cls.from_dict(f) for f in data["factors"]])

    @classmethod
    def from_json(cls, text: str) -> "DomainSpec":
        return cls.from_dict(json.loads(text))

    def __str__(self) -> str:
        k = self.kind
        if k == "I":
            return f"I({self.p},{self.q})"
        if k in ("II", "III", "IV"):
            return f"{k}({self.n})"
        if k == "polydisk":
            return f"Polydisk({self.r})"
        return " x ".join(str(f) for f in self.factors)


@dataclass(frozen=True)
class TangentVector:
    """A holomorphic tangent vector ``dir`` at the point ``base``."""

    base: np.ndarray
    dir: np.ndarray

    @classmethod
    def at_origin(cls, d: DomainSpec, v) -> "TangentVector":
        v = np.asarray(v, dtype=complex).ravel()
        return cls(np.zeros(d.dim, dtype=complex), v)


def _as_point(d: DomainSpec, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.ndim == 0:
        z = z.reshape(1)
    if z.shape[-1] != d.dim:
        raise DomainError(f"{d} has dimension {d.dim}, got a vector of length {z.shape[-1]}")
    return z


def split(d: DomainSpec, z) -> Iterator[tuple[DomainSpec, np.ndarray]]:
    """Yield ``(factor, coordinates)`` pairs over the irreducible factors of ``d``."""
    z = _as_point(d, z)
    for f, sl in d.factor_slices():
        yield f, z[..., sl]


# packing


def _triu(n: int, strict: bool) -> tuple[np.ndarray, np.ndarray]:
    return np.triu_indices(n, 1 if strict else 0)


def to_matrix(d: DomainSpec, z) -> np.ndarray:
    """Matrix view of an irreducible point (vector for type IV).  Broadcasts over leading axes."""
    z = _as_point(d, z)
    k = d.kind
    lead = z.shape[:-1]
    if k == "I":
        return z.reshape(*lead, d.p, d.q)
    if k in ("II", "III"):
        n = d.n
        iu, ju = _triu(n, strict=(k == "II"))
        m = np.zeros((*lead, n, n), dtype=complex)
        m[..., iu, ju] = z
        sign = -1.0 if k == "II" else 1.0
        off = iu != ju
        m[..., ju[off], iu[off]] = sign * z[..., off]
        return m
    if k == "IV":
        return z.copy()
    raise DomainError(f"{d} has no single matrix view; split it into factors first")


def from_matrix(d: DomainSpec, m) -> np.ndarray:
    """Inverse of :func:`to_matrix`: read off the packed coordinates."""
    m = np.asarray(m, dtype=complex)
    k = d.kind
    if k == "I":
        return m.reshape(*m.shape[:-2], d.p * d.q).copy()
    if k in ("II", "III"):
        iu, ju = _triu(d.n, strict=(k == "II"))
        return m[..., iu, ju].copy()
    if k == "IV":
        return m.copy()
    raise DomainError(f"{d} has no single matrix view")


def basis_matrices(d: DomainSpec) -> np.ndarray:
    """Matrix views of the coordinate unit vectors, shape ``(dim, ...)``."""
    return to_matrix(d, np.eye(d.dim, dtype=complex))


# generic norm and spectral data


def spectral_values(d: DomainSpec, z) -> np.ndarray:
    """Polydisk coordinates (descending) of an irreducible point.

    These are singular values for types I-III (each antisymmetric pair listed
    once for type II) and the two Lie-ball invariants for type IV.
    """
    z = _as_point(d, z)
    k = d.kind
    if k in ("I", "III"):
        return np.linalg.svd(to_matrix(d, z), compute_uv=False)
    if k == "II":
        s = np.linalg.svd(to_matrix(d, z), compute_uv=False)
        return s[..., 0 : 2 * (d.n // 2) : 2]
    if k == "IV":
        nrm2 = np.sum(np.abs(z) ** 2, axis=-1)
        t = np.abs(np.sum(z * z, axis=-1))
        a = np.sqrt(nrm2 + t)
        # nrm2 - t cancels for nearly real z; use |z|^4 - |z^t z|^2 = 4 |x ^ y|^2
        x, y = z.real, z.imag
        wedge = x[..., :, None] * y[..., None, :] - x[..., None, :] * y[..., :, None]
        wedge2 = 0.5 * np.sum(wedge**2, axis=(-2, -1))
        with np.errstate(invalid="ignore", divide="ignore"):
            b = np.where(a > 0, 2.0 * np.sqrt(wedge2) / np.where(a > 0, a, 1.0), 0.0)
        return np.stack([(a + b) / np.sqrt(2.0), (a - b) / np.sqrt(2.0)], axis=-1)
    raise DomainError(f"spectral values are defined per irreducible factor, not for {d}")


def log_generic_norm(d: DomainSpec, z) -> np.ndarray | float:
    """``log h(z, z)``; NaN where the point is not inside the domain.

    Accepts a single point or a stack of points along the leading axes and is
    the hot path shared by every finite-difference routine.
    """
    z = _as_point(d, z)
    lead = z.shape[:-1]
    flat = z.reshape(-1, d.dim)
    total = np.zeros(flat.shape[0])
    for f, sl in d.factor_slices():
        zf = flat[:, sl]
        if f.kind == "I":
            total += kernels.logdet_unit_minus_gram(zf.reshape(-1, f.p, f.q))
        elif f.kind == "III":
            total += kernels.logdet_unit_minus_gram(to_matrix(f, zf))
        elif f.kind == "II":
            total += 0.5 * kernels.logdet_unit_minus_gram(to_matrix(f, zf))
        else:
            total += kernels.log_lie_ball_norm(zf)
    out = total.reshape(lead)
    return float(out) if out.ndim == 0 else out


def generic_norm(d: DomainSpec, z) -> float:
    """The generic norm ``h(z, z)``; equals 1 at the origin and 0 on the boundary.

    Unlike :func:`log_generic_norm` this evaluates the polynomial directly, so
    it is also meaningful outside the domain.
    """
    z = _as_point(d, z)
    if z.ndim != 1:
        raise DomainError("generic_norm takes a single point")
    h = 1.0
    for f, zf in split(d, z):
        if f.kind == "IV":
            h *= 1.0 - 2.0 * np.vdot(zf, zf).real + abs(np.sum(zf * zf)) ** 2
        else:
            m = to_matrix(f, zf)
            a = np.eye(m.shape[0]) - m @ m.conj().T
            val = np.linalg.det(a).real
            if f.kind == "II":
                val = np.sqrt(max(val, 0.0))
            h *= val
    return float(h)


def contains(d: DomainSpec, z, margin: float = 0.0) -> bool:
    """True when ``z`` satisfies every defining inequality by at least ``margin``."""
    if margin < 0:
        raise DomainError("margin must be nonnegative")
    z = _as_point(d, z)
    # the Lie ball test |z|^2 < 1, h > 0 cancels near the boundary; s_max < 1 is equivalent
    for f, zf in split(d, z):
        if not spectral_values(f, zf)[0] < 1.0 - margin:
            return False
    return True


def bergman_kernel(d: DomainSpec, z, volumes: Sequence[float] | None = None) -> float:
    """Diagonal Bergman kernel ``prod_j h_j(z,z)^(-genus_j) / Vol_j``.

    ``volumes`` gives one Euclidean volume per irreducible factor and defaults to 1.
    """
    z = _as_point(d, z)
    if not contains(d, z):
        raise DomainError(f"point is not inside {d}")
    parts = list(split(d, z))
    if volumes is None:
        volumes = [1.0] * len(parts)
    if len(volumes) != len(parts):
        raise DomainError(f"expected {len(parts)} volumes, got {len(volumes)}")
    k = 1.0
    for (f, zf), vol in zip(parts, volumes):
        k *= generic_norm(f, zf) ** (-f.genus) / vol
    return float(k)


def _lie_ball_boundary_distance(z: np.ndarray, tol: float = 1e-15) -> float:
    # After a phase rotation making z^t z real and nonnegative, z = x + i y with
    # x, y real, x.y = 0 and |x| >= |y|.  The leading polydisk coordinate grows
    # along u = (x_hat + i y_hat)/sqrt(2); locate the exit point on that ray.
    f = DomainSpec.type_iv(z.shape[0])
    phase = np.exp(0.5j * np.angle(np.sum(z * z)))
    w = z / phase
    x, y = w.real, w.imag
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return 1.0 / np.sqrt(2.0)
    xh = x / nx
    ny = np.linalg.norm(y)
    if ny > 1e-14 * nx:
        yh = y / ny
    else:
        e = np.zeros_like(xh)
        e[np.argmin(np.abs(xh))] = 1.0
        yh = e - np.dot(e, xh) * xh
        yh /= np.linalg.norm(yh)
    u = phase * (xh + 1j * yh) / np.sqrt(2.0)

    # s_max is a norm, so it is convex along the ray and crosses 1 exactly once
    def excess(step: float) -> float:
        return spectral_values(f, z + step * u)[0] - 1.0

    return float(optimize.brentq(excess, 0.0, 3.0, xtol=tol, rtol=4 * np.finfo(float).eps))


def boundary_distance(d: DomainSpec, z) -> float:
    """Euclidean distance from an interior point to the boundary.

    Types I-III use the matrix view (``1 - s_max``), polydisks the smallest
    coordinate gap, type IV a root search
    along the characteristic direction of the leading polydisk coordinate.  Products take the minimum.
    """
    z = _as_point(d, z)
    if not contains(d, z):
        raise DomainError(f"point is not inside {d}")
    out = np.inf
    for f, zf in split(d, z):
        if f.kind == "IV":
            out = min(out, _lie_ball_boundary_distance(zf))
        else:
            out = min(out, 1.0 - spectral_values(f, zf)[0])
    return float(out)
