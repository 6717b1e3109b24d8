from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from intern.expr import Expression, Jet2, parse, rebind


class GeometryError(Exception):
    pass


class DimensionMismatchError(GeometryError):
    pass


class DegreeError(GeometryError):
    pass


class DomainError(GeometryError):
    pass


_MAX_REJECTION_ROUNDS = 200


@dataclass(frozen=True)
class Chart:
    """
    A coordinate patch: named coordinates, a sampling box and a list of
    expressions that must stay strictly positive on the domain.
    """
    name: str
    coords: tuple
    box: tuple
    positive: tuple = ()

    def __post_init__(self):
        if len(self.box) != len(self.coords):
            raise DimensionMismatchError(
                f"chart '{self.name}': {len(self.coords)} coordinates but {len(self.box)} box intervals"
            )
        for e in self.positive:
            missing = e.symbols - set(self.coords)
            if missing:
                raise DimensionMismatchError(
                    f"chart '{self.name}': domain expression uses undeclared {sorted(missing)}"
                )

    @classmethod
    def build(cls, name: str, coords: Sequence[str], box, positive: Sequence[str] = (),
              constants: Optional[dict] = None) -> "Chart":
        coords = tuple(coords)
        if isinstance(box, dict):
            box = [box[c] for c in coords]
        box = tuple((float(lo), float(hi)) for lo, hi in box)
        exprs = tuple(parse(src, coords, constants) for src in positive)
        return cls(name, coords, box, exprs)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def index(self, coord: str) -> int:
        return self.coords.index(coord)

    def parse(self, source: str, constants: Optional[dict] = None) -> Expression:
        return parse(source, self.coords, constants)

    def variable(self, p) -> Jet2:
        return Jet2.variable(self._check_point(p))

    def _check_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.dim,):
            raise DimensionMismatchError(
                f"chart '{self.name}' has dimension {self.dim}, got a point of shape {p.shape}"
            )
        return p

    def in_box(self, p) -> bool:
        p = self._check_point(p)
        return all(lo <= x <= hi for x, (lo, hi) in zip(p, self.box))

    def contains(self, p) -> bool:
        p = self._check_point(p)
        if not np.all(np.isfinite(p)):
            return False
        if not self.in_box(p):
            return False
        return all(e(p) > 0 for e in self.positive)

    def require(self, p) -> np.ndarray:
        if not self.contains(p):
            raise DomainError(f"point {np.asarray(p).tolist()} outside chart '{self.name}'")
        return np.asarray(p, dtype=float)

    def sample(self, count: int, seed: int) -> np.ndarray:
        """Seeded uniform draws from the box, rejecting points outside the domain."""
        rng = np.random.default_rng(seed)
        lo = np.array([b[0] for b in self.box])
        hi = np.array([b[1] for b in self.box])
        accepted = []
        for _ in range(_MAX_REJECTION_ROUNDS):
            for p in rng.uniform(lo, hi, size=(max(count, 8), self.dim)):
                if self.contains(p):
                    accepted.append(p)
                    if len(accepted) == count:
                        return np.array(accepted)
        raise DomainError(f"chart '{self.name}': could not draw {count} points inside the domain")

    def extend(self, coord: str, interval, name: Optional[str] = None, positive_extra=()) -> "Chart":
        """Product with one more coordinate appended at the end."""
        coords = self.coords + (coord,)
        positive = tuple(rebind(e, coords) for e in self.positive)
        positive += tuple(parse(src, coords) for src in positive_extra)
        return Chart(name or f"{self.name}x{coord}", coords,
                     self.box + ((float(interval[0]), float(interval[1])),), positive)
