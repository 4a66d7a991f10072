"""Planar surface-code layout: qubits on edges, stars and plaquettes on sites.

Uses the diagonal (2d-1) x (2d-1) grid picture of the distance-d planar
patch: data qubits sit on cells with even r+c (d^2 + (d-1)^2 of them),
X-stars on odd-r cells, Z-plaquettes on even-r/odd-c cells, each acting on
its 2..4 in-grid neighbours.  One logical qubit: logical Z runs down the
left column, logical X along the top row.
"""
from __future__ import annotations

from dataclasses import dataclass, field


class CapacityError(ValueError):
    """Requested code distance exceeds the dense-statevector budget."""


@dataclass(frozen=True)
class CodeLayout:
    d: int
    positions: tuple = field(repr=False)      # (r, c) per data qubit, row-major
    index: dict = field(repr=False)           # (r, c) -> qubit index
    x_stars: tuple = field(repr=False)        # tuples of qubit indices
    z_plaquettes: tuple = field(repr=False)
    logical_x: tuple = field(repr=False)
    logical_z: tuple = field(repr=False)

    @property
    def n_data(self) -> int:
        return len(self.positions)

    @property
    def n_stabilizers(self) -> int:
        return len(self.x_stars) + len(self.z_plaquettes)


def make_layout(d: int, max_distance: int = 4) -> CodeLayout:
    """Build the distance-d planar layout; d > max_distance raises CapacityError."""
    if d < 2:
        raise ValueError(f"code distance must be >= 2, got {d}")
    if d > max_distance:
        raise CapacityError(
            f"d={d} needs {d * d + (d - 1) ** 2 + 1} dense qubits; limit is d={max_distance}")
    size = 2 * d - 1
    positions = [(r, c) for r in range(size) for c in range(size) if (r + c) % 2 == 0]
    index = {pos: i for i, pos in enumerate(positions)}

    def neighbours(r, c):
        out = []
        for rr, cc in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if 0 <= rr < size and 0 <= cc < size:
                out.append(index[(rr, cc)])
        return tuple(sorted(out))

    x_stars, z_plaquettes = [], []
    for r in range(size):
        for c in range(size):
            if (r + c) % 2 == 0:
                continue
            if r % 2 == 1:
                x_stars.append(neighbours(r, c))
            else:
                z_plaquettes.append(neighbours(r, c))

    logical_z = tuple(index[(r, 0)] for r in range(0, size, 2))
    logical_x = tuple(index[(0, c)] for c in range(0, size, 2))
    return CodeLayout(d=d, positions=tuple(positions), index=index,
                      x_stars=tuple(x_stars), z_plaquettes=tuple(z_plaquettes),
                      logical_x=logical_x, logical_z=logical_z)
