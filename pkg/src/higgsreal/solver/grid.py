"""Uniform rectangular grids and metric fields sampled on them."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..linalg import SymmetricPairing


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class GridDomain:
    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int
    holes: tuple[tuple[complex, float], ...] = field(default=())

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise GridError("grid needs at least 8 nodes per direction")
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise GridError("empty bounding box")
        holes = tuple((complex(c), float(r)) for c, r in self.holes)
        if any(r <= 0 for _, r in holes):
            raise GridError("hole radius must be positive")
        object.__setattr__(self, "holes", holes)

    @classmethod
    def parse(cls, text: str) -> "GridDomain":
        """``"x0,x1,y0,y1,nx,ny"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 6:
            raise GridError(f"domain spec needs 6 fields, got {len(parts)}")
        try:
            x0, x1, y0, y1 = (float(p) for p in parts[:4])
            nx, ny = int(parts[4]), int(parts[5])
        except ValueError as exc:
            raise GridError(f"bad domain spec {text!r}") from exc
        return cls(x0, x1, y0, y1, nx, ny)

    @classmethod
    def square(cls, half_width: float, n: int, center: complex = 0j) -> "GridDomain":
        c = complex(center)
        return cls(c.real - half_width, c.real + half_width,
                   c.imag - half_width, c.imag + half_width, n, n)

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / (self.ny - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.x0, self.x1, self.nx)

    @property
    def ys(self) -> np.ndarray:
        return np.linspace(self.y0, self.y1, self.ny)

    @property
    def z(self) -> np.ndarray:
        """Complex node coordinates, shape ``(ny, nx)``."""
        X, Y = np.meshgrid(self.xs, self.ys)
        return X + 1j * Y

    @property
    def boundary_mask(self) -> np.ndarray:
        m = np.zeros((self.ny, self.nx), dtype=bool)
        m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
        return m

    @property
    def hole_mask(self) -> np.ndarray:
        m = np.zeros((self.ny, self.nx), dtype=bool)
        zz = self.z
        for c, r in self.holes:
            m |= np.abs(zz - c) <= r
        return m

    @property
    def fixed_mask(self) -> np.ndarray:
        return self.boundary_mask | self.hole_mask

    @property
    def free_mask(self) -> np.ndarray:
        return ~self.fixed_mask

    def contains(self, other: "GridDomain") -> bool:
        return (self.x0 <= other.x0 and self.x1 >= other.x1
                and self.y0 <= other.y0 and self.y1 >= other.y1)

    def shrink_mask(self, margin: float) -> np.ndarray:
        """Nodes at distance at least ``margin`` from the bounding box."""
        zz = self.z
        if 2 * margin >= min(self.x1 - self.x0, self.y1 - self.y0):
            raise GridError("margin larger than domain")
        return ((zz.real >= self.x0 + margin) & (zz.real <= self.x1 - margin)
                & (zz.imag >= self.y0 + margin) & (zz.imag <= self.y1 - margin)
                & ~self.hole_mask)

    def region_mask(self, x0: float, x1: float, y0: float, y1: float) -> np.ndarray:
        zz = self.z
        tol = 1e-12 * max(1.0, abs(self.x1), abs(self.y1))
        return ((zz.real >= x0 - tol) & (zz.real <= x1 + tol)
                & (zz.imag >= y0 - tol) & (zz.imag <= y1 + tol))

    def to_json(self) -> dict:
        d = {"x0": self.x0, "x1": self.x1, "y0": self.y0, "y1": self.y1,
             "nx": self.nx, "ny": self.ny}
        if self.holes:
            d["holes"] = [[c.real, c.imag, r] for c, r in self.holes]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "GridDomain":
        holes = tuple((complex(a, b), r) for a, b, r in d.get("holes", []))
        return cls(d["x0"], d["x1"], d["y0"], d["y1"], int(d["nx"]), int(d["ny"]), holes)


@dataclass
class MetricField:
    """Per-node metric; ``P[j, i]`` satisfies ``h(u, v) = v^H P u`` at node ``(x_i, y_j)``."""

    domain: GridDomain
    P: np.ndarray
    C: SymmetricPairing

    def __post_init__(self):
        self.P = np.asarray(self.P, dtype=complex)
        d = self.domain
        if self.P.shape[:2] != (d.ny, d.nx) or self.P.shape[2] != self.P.shape[3]:
            raise GridError(f"metric array has shape {self.P.shape}, expected ({d.ny}, {d.nx}, r, r)")
        if self.P.shape[2] != self.C.dim:
            raise GridError("metric rank does not match pairing")

    @property
    def r(self) -> int:
        return self.P.shape[2]

    @property
    def gram(self) -> np.ndarray:
        return np.swapaxes(self.P, -1, -2)

    @classmethod
    def constant(cls, domain: GridDomain, P: np.ndarray, C: SymmetricPairing) -> "MetricField":
        P = np.asarray(P, dtype=complex)
        return cls(domain, np.broadcast_to(P, (domain.ny, domain.nx) + P.shape).copy(), C)

    def to_json(self) -> dict:
        G = self.gram
        zz = self.domain.z
        nodes = []
        for j in range(self.domain.ny):
            for i in range(self.domain.nx):
                nodes.append({"x": float(zz[j, i].real), "y": float(zz[j, i].imag),
                              "gram_re": G[j, i].real.tolist(), "gram_im": G[j, i].imag.tolist()})
        return {"domain": self.domain.to_json(), "r": self.r,
                "pairing": {"dim": self.C.dim, "re": self.C.gram.real.tolist(),
                            "im": self.C.gram.imag.tolist()},
                "nodes": nodes}

    @classmethod
    def from_json(cls, d: dict) -> "MetricField":
        dom = GridDomain.from_json(d["domain"])
        r = int(d["r"])
        G = np.array([np.array(n["gram_re"]) + 1j * np.array(n["gram_im"]) for n in d["nodes"]])
        G = G.reshape(dom.ny, dom.nx, r, r)
        pc = d["pairing"]
        C = SymmetricPairing(np.array(pc["re"]) + 1j * np.array(pc["im"]))
        return cls(dom, np.swapaxes(G, -1, -2), C)
