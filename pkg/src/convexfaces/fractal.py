"""Spherical fractal extreme sets and box-counting dimension estimates.

Two constructions:

* an Apollonian cap packing: start from the four sphere caps cut off by
  the face planes of the regular tetrahedron whose edges touch the unit
  sphere (their boundary circles are mutually tangent), then repeatedly
  fill every curvilinear triangular gap with the tangent cap given by the
  Descartes circle relation, worked in a stereographic planar chart;
* a Sierpinski triangle drawn in the tangent plane below the south pole
  and projected centrally onto the sphere.

The convex hull of the sphere minus the open caps has one flat disk face
per cap and a fractal set of extreme points; ``face_census`` verifies the
resulting {0, 2} proper-face pattern, and ``box_dimension`` estimates the
non-integer dimension of the extreme sets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng

MAX_DEPTH = 12
_TANGENCY_TOL = 1e-9


@dataclass(frozen=True)
class Cap:
    """Open spherical cap {x on S2 : <normal, x> > offset}."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        normal = np.asarray(self.normal, dtype=float).reshape(3)
        if abs(np.linalg.norm(normal) - 1.0) > 1e-12:
            raise ValueError("cap normal must be a unit vector")
        if not -1.0 < self.offset < 1.0:
            raise ValueError("cap offset must lie strictly inside (-1, 1)")
        normal.setflags(write=False)
        object.__setattr__(self, "normal", normal)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def angular_radius(self) -> float:
        return float(np.arccos(self.offset))

    @property
    def area(self) -> float:
        return 2.0 * np.pi * (1.0 - self.offset)


@dataclass(frozen=True)
class CapPacking:
    caps: tuple[Cap, ...]
    generation_depth: int

    def normals(self) -> np.ndarray:
        return np.array([c.normal for c in self.caps])

    def offsets(self) -> np.ndarray:
        return np.array([c.offset for c in self.caps])

    def generation_sizes(self) -> tuple[int, ...]:
        sizes = [4]
        for g in range(1, self.generation_depth + 1):
            sizes.append(4 * 3 ** (g - 1))
        return tuple(sizes)

    def total_cap_area(self) -> float:
        return float(sum(c.area for c in self.caps))

    def residual_area_fraction(self) -> float:
        return 1.0 - self.total_cap_area() / (4.0 * np.pi)


@dataclass(frozen=True)
class PlanarCircle:
    """Chart circle; negative curvature marks the enclosing circle."""

    center: complex
    curvature: float

    def __post_init__(self):
        if self.curvature == 0.0:
            raise ValueError("curvature must be nonzero")

    @property
    def radius(self) -> float:
        return 1.0 / abs(self.curvature)


# ---------------------------------------------------------------------------
# stereographic chart


class _Chart:
    """Stereographic projection from a pole point on the unit sphere."""

    def __init__(self, pole: np.ndarray):
        pole = np.asarray(pole, dtype=float)
        self.pole = pole / np.linalg.norm(pole)
        seed_axis = np.zeros(3)
        seed_axis[int(np.argmin(np.abs(self.pole)))] = 1.0
        t1 = seed_axis - (seed_axis @ self.pole) * self.pole
        self.t1 = t1 / np.linalg.norm(t1)
        self.t2 = np.cross(self.pole, self.t1)

    def to_plane(self, x: np.ndarray) -> complex:
        denom = 1.0 - x @ self.pole
        return complex(x @ self.t1, x @ self.t2) / denom

    def to_sphere(self, z: complex) -> np.ndarray:
        r2 = abs(z) ** 2
        return (
            2.0 * z.real * self.t1 + 2.0 * z.imag * self.t2 + (r2 - 1.0) * self.pole
        ) / (r2 + 1.0)


def _circumcircle(z1: complex, z2: complex, z3: complex) -> tuple[complex, float]:
    a = np.array(
        [
            [2.0 * (z2.real - z1.real), 2.0 * (z2.imag - z1.imag)],
            [2.0 * (z3.real - z1.real), 2.0 * (z3.imag - z1.imag)],
        ]
    )
    b = np.array(
        [abs(z2) ** 2 - abs(z1) ** 2, abs(z3) ** 2 - abs(z1) ** 2]
    )
    cx, cy = np.linalg.solve(a, b)
    center = complex(cx, cy)
    return center, abs(center - z1)


def _cap_rim_points(cap: Cap, count: int = 3, phase: float = 0.0) -> np.ndarray:
    """Points on the cap's boundary circle."""
    n = cap.normal
    seed_axis = np.zeros(3)
    seed_axis[int(np.argmin(np.abs(n)))] = 1.0
    a = seed_axis - (seed_axis @ n) * n
    a /= np.linalg.norm(a)
    b = np.cross(n, a)
    s = np.sqrt(max(0.0, 1.0 - cap.offset**2))
    t = phase + 2.0 * np.pi * np.arange(count) / count
    return cap.offset * n + s * (np.outer(np.cos(t), a) + np.outer(np.sin(t), b))


def _cap_to_circle(cap: Cap, chart: _Chart) -> PlanarCircle:
    pts = [chart.to_plane(p) for p in _cap_rim_points(cap)]
    center, radius = _circumcircle(*pts)
    # the cap's deepest point tells us which side of the circle it maps to
    deepest = cap.normal
    if abs(deepest @ chart.pole - 1.0) < 1e-12:
        sign = -1.0  # cap contains the pole: image is the circle's exterior
    else:
        inside = abs(chart.to_plane(deepest) - center) < radius
        sign = 1.0 if inside else -1.0
    return PlanarCircle(center, sign / radius)


def _circle_to_cap(circle: PlanarCircle, chart: _Chart) -> Cap:
    if circle.curvature <= 0:
        raise ValueError("only bounded (positive curvature) circles map to caps here")
    zs = [
        circle.center + circle.radius * np.exp(2j * np.pi * k / 3.0) for k in range(3)
    ]
    pts = [chart.to_sphere(z) for z in zs]
    normal = np.cross(pts[1] - pts[0], pts[2] - pts[0])
    normal /= np.linalg.norm(normal)
    offset = float(normal @ pts[0])
    interior = chart.to_sphere(circle.center)
    if interior @ normal < offset:
        normal, offset = -normal, -offset
    return Cap(normal, offset)


# ---------------------------------------------------------------------------
# Apollonian packing

_TETRA_VERTICES = np.array(
    [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]]
)


def _initial_caps() -> list[Cap]:
    # the regular tetrahedron with these vertices has the unit sphere as its
    # midsphere (edge midpoints are at distance 1); the cap cut off by the
    # face opposite vertex v has normal -v/|v| and offset 1/sqrt(3)
    caps = []
    for v in _TETRA_VERTICES:
        caps.append(Cap(-v / np.sqrt(3.0), 1.0 / np.sqrt(3.0)))
    return caps


@dataclass(frozen=True)
class GasketData:
    """Planar bookkeeping behind a packing, kept for verification."""

    circles: tuple[PlanarCircle, ...]
    quadruples: tuple[tuple[int, int, int, int], ...]
    chart: _Chart


def _planar_gasket(depth: int, chart: _Chart, initial: list[Cap]) -> GasketData:
    circles = [_cap_to_circle(c, chart) for c in initial]
    quadruples = [(0, 1, 2, 3)]
    gaps = [
        (1, 2, 3, 0),
        (0, 2, 3, 1),
        (0, 1, 3, 2),
        (0, 1, 2, 3),
    ]  # (a, b, c, parent): triangle bounded by a, b, c; parent is the
    # fourth circle of their common Descartes quadruple
    for _ in range(depth):
        next_gaps = []
        for a, b, c, p in gaps:
            ka, kb, kc, kp = (circles[i].curvature for i in (a, b, c, p))
            za, zb, zc, zp = (circles[i].center for i in (a, b, c, p))
            k_new = 2.0 * (ka + kb + kc) - kp
            z_new = (2.0 * (ka * za + kb * zb + kc * zc) - kp * zp) / k_new
            idx = len(circles)
            circles.append(PlanarCircle(z_new, k_new))
            quadruples.append((a, b, c, idx))
            next_gaps.extend([(a, b, idx, c), (a, c, idx, b), (b, c, idx, a)])
        gaps = next_gaps
    return GasketData(tuple(circles), tuple(quadruples), chart)


def gasket_data(depth: int) -> GasketData:
    """Planar circles and Descartes quadruples behind apollonian_packing."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > MAX_DEPTH:
        raise ValueError(f"depth {depth} exceeds guard {MAX_DEPTH}")
    initial = _initial_caps()
    chart = _Chart(initial[0].normal)  # pole at the first cap's center point
    return _planar_gasket(depth, chart, initial)


def apollonian_packing(depth: int) -> CapPacking:
    """Caps through the given generation depth (4 caps at depth 0)."""
    data = gasket_data(depth)
    caps = _initial_caps()
    for circle in data.circles[4:]:
        caps.append(_circle_to_cap(circle, data.chart))
    return CapPacking(tuple(caps), depth)


def descartes_residual(data: GasketData) -> float:
    """Worst deviation of any generated quadruple from the circle relation."""
    worst = 0.0
    for quad in data.quadruples:
        ks = np.array([data.circles[i].curvature for i in quad])
        res = abs((ks.sum()) ** 2 - 2.0 * float(ks @ ks))
        worst = max(worst, res / max(1.0, ks.max() ** 2))
    return worst


def planar_tangency_residual(data: GasketData) -> float:
    """Worst tangency defect among circle pairs inside each quadruple."""
    worst = 0.0
    for quad in data.quadruples:
        for i in range(4):
            for j in range(i + 1, 4):
                ci, cj = data.circles[quad[i]], data.circles[quad[j]]
                gap = abs(abs(ci.center - cj.center) - abs(1.0 / ci.curvature + 1.0 / cj.curvature))
                worst = max(worst, gap)
    return worst


def cap_separation_matrix(packing: CapPacking) -> np.ndarray:
    """Angular center distance minus summed angular radii for all cap pairs."""
    normals = packing.normals()
    radii = np.arccos(packing.offsets())
    cosines = np.clip(normals @ normals.T, -1.0, 1.0)
    sep = np.arccos(cosines) - (radii[:, None] + radii[None, :])
    np.fill_diagonal(sep, np.inf)
    return sep


def min_cap_separation(packing: CapPacking) -> float:
    """Most negative value is the worst overlap; >= -1e-9 means disjoint."""
    return float(cap_separation_matrix(packing).min())


def sphere_tangency_residual(packing: CapPacking, data: GasketData) -> float:
    """Worst angular tangency defect among the recorded tangent pairs."""
    sep = cap_separation_matrix(packing)
    worst = 0.0
    for quad in data.quadruples:
        for i in range(4):
            for j in range(i + 1, 4):
                worst = max(worst, abs(sep[quad[i], quad[j]]))
    return worst


# ---------------------------------------------------------------------------
# residual sampling

@dataclass(frozen=True)
class ResidualSample:
    """Accepted residual points plus the rejection-sampling diagnostics."""

    points: np.ndarray
    n_drawn: int
    n_accepted: int

    @property
    def acceptance(self) -> float:
        return self.n_accepted / self.n_drawn if self.n_drawn else 0.0

    def __len__(self) -> int:
        return self.n_accepted


_MIN_ACCEPTANCE = 1e-4
_BATCH = 1 << 15
_CAP_CHUNK = 1024


def _outside_all_caps(
    points: np.ndarray, normals: np.ndarray, offsets: np.ndarray, sizes
) -> np.ndarray:
    """Boolean mask of points outside every open cap.

    Caps are tested generation by generation (the big early caps reject
    most points), keeping only survivors, with a chunk bound on the score
    matrix so memory stays flat at any depth.
    """
    alive = np.arange(points.shape[0])
    pts = points
    start = 0
    for size in sizes:
        block_n = normals[start : start + size]
        block_o = offsets[start : start + size]
        start += size
        keep = np.ones(pts.shape[0], dtype=bool)
        for c0 in range(0, size, _CAP_CHUNK):
            sub_n = block_n[c0 : c0 + _CAP_CHUNK]
            sub_o = block_o[c0 : c0 + _CAP_CHUNK]
            keep &= ~np.any(pts @ sub_n.T > sub_o, axis=1)
        alive = alive[keep]
        pts = pts[keep]
        if alive.size == 0:
            break
    mask = np.zeros(points.shape[0], dtype=bool)
    mask[alive] = True
    return mask


def residual_sample(packing: CapPacking, n: int, seed: int) -> ResidualSample:
    """First n uniform sphere points (in counter order) outside every cap.

    Aborts with diagnostics when the acceptance rate drops below 1e-4;
    the result is independent of the internal batch size.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    normals = packing.normals()
    offsets = packing.offsets()
    sizes = packing.generation_sizes()
    accepted: list[np.ndarray] = []
    total = 0
    drawn = 0
    while True:
        pts = rng.sphere_points(seed, drawn, _BATCH, 3)
        idx = np.nonzero(_outside_all_caps(pts, normals, offsets, sizes))[0]
        if total + idx.size >= n:
            need = n - total
            accepted.append(pts[idx[:need]])
            drawn += int(idx[need - 1]) + 1  # draws consumed up to the n-th hit
            break
        accepted.append(pts[idx])
        total += idx.size
        drawn += _BATCH
        if drawn >= 64 * _BATCH and total / drawn < _MIN_ACCEPTANCE:
            raise RuntimeError(
                f"residual acceptance {total}/{drawn} fell below {_MIN_ACCEPTANCE}; "
                f"depth {packing.generation_depth} with {len(packing.caps)} caps"
            )
    return ResidualSample(np.vstack(accepted), drawn, n)


# ---------------------------------------------------------------------------
# Sierpinski triangle on the sphere

_SIERPINSKI_ANGLES = np.pi / 2.0 + 2.0 * np.pi * np.arange(3) / 3.0

# equilateral triangle of circumradius 1 in the plane tangent to the sphere
# at the south pole (z = -1); it subtends 45 degrees of arc after central
# projection, so the projection is bi-Lipschitz on it
SIERPINSKI_VERTICES = np.column_stack(
    [np.cos(_SIERPINSKI_ANGLES), np.sin(_SIERPINSKI_ANGLES), -np.ones(3)]
)

_DIGITS = 48


def sierpinski_chart(points: int, seed: int) -> np.ndarray:
    """Points of the planar Sierpinski attractor in the chart plane z = -1.

    Each point evaluates the chaos-game composition of 48 random midpoint
    maps toward the triangle vertices, truncated on the attractor itself;
    point i depends only on (seed, i), so workers can slice the index range.
    """
    if points < 1:
        raise ValueError("points must be >= 1")
    digits = rng.uniform_ints(seed, 0, points * _DIGITS, 3).reshape(points, _DIGITS)
    out = np.zeros((points, 3))
    weight = 1.0
    for j in range(_DIGITS):
        weight *= 0.5
        out += weight * SIERPINSKI_VERTICES[digits[:, j]]
    # the geometric tail keeps the point exactly on the attractor's closure
    out += weight * SIERPINSKI_VERTICES[digits[:, -1]]
    return out


def sierpinski_sphere(points: int, seed: int) -> np.ndarray:
    """Central projection p -> p/|p| of the chart attractor onto the sphere."""
    chart = sierpinski_chart(points, seed)
    return chart / np.linalg.norm(chart, axis=1)[:, None]


# ---------------------------------------------------------------------------
# box counting

@dataclass(frozen=True)
class BoxCountFit:
    """Box counts per scale and the log-log least squares slope."""

    scales: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    r2: float


def box_dimension(points: np.ndarray, scales) -> BoxCountFit:
    """Count occupied axis-aligned boxes per scale and fit log N ~ log(1/eps)."""
    scales = tuple(float(s) for s in scales)
    if len(scales) < 3:
        raise ValueError("need at least 3 scales for a meaningful fit")
    if any(s <= 0 for s in scales):
        raise ValueError("scales must be positive")
    pts = np.asarray(points, dtype=float)
    counts = []
    for eps in scales:
        cells = np.floor(pts / eps).astype(np.int64)
        counts.append(int(np.unique(cells, axis=0).shape[0]))
    x = np.log(1.0 / np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return BoxCountFit(scales, tuple(counts), float(slope), r2)


def dyadic_scales(first: int, last: int) -> tuple[float, ...]:
    """Box sides 2^-first .. 2^-last (inclusive)."""
    if last < first:
        raise ValueError("last exponent must be >= first")
    return tuple(2.0**-k for k in range(first, last + 1))


def great_circle_points(n: int) -> np.ndarray:
    """n points on a tilted great circle (a smooth dimension-1 control)."""
    axis = np.array([1.0, 1.0, 1.0]) / np.sqrt(3.0)
    a = np.array([1.0, -1.0, 0.0]) / np.sqrt(2.0)
    b = np.cross(axis, a)
    t = 2.0 * np.pi * np.arange(n) / n
    return np.outer(np.cos(t), a) + np.outer(np.sin(t), b)


def sphere_surface_points(n: int, seed: int) -> np.ndarray:
    """n uniform sphere points (a smooth dimension-2 control)."""
    return rng.sphere_points(seed, 0, n, 3)


# ---------------------------------------------------------------------------
# face census of the residual hull

@dataclass(frozen=True)
class FaceCensus:
    """Proper faces of the hull of the sphere-minus-caps residual set."""

    cap_count: int
    disk_face_count: int
    disk_face_dims: tuple[int, ...]
    proper_dims: tuple[int, ...]
    sampled_dims: tuple[int, ...]
    max_support_error: float


def _hull_face_dim(packing: CapPacking, u: np.ndarray, axis_tol: float = 1e-9) -> int:
    """Dimension of the residual hull's exposed face along u.

    A direction pointing into an open cap exposes either the cap's whole
    rim disk (when it is the cap axis) or a single rim point; any other
    direction exposes the residual sphere point it passes through.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    scores = packing.normals() @ u - packing.offsets()
    inside = np.nonzero(scores > 0)[0]
    if inside.size == 0:
        return 0
    cap = packing.caps[int(inside[0])]
    if np.linalg.norm(u - cap.normal) <= axis_tol:
        return 2
    return 0


def face_census(packing: CapPacking, directions: int = 10_000, seed: int = 0) -> FaceCensus:
    """One flat disk face per cap plus extreme points, and nothing else.

    Each cap normal is checked to expose a 2-dimensional face at support
    value equal to the cap offset (via rim points of the cap's boundary
    circle); a randomized direction sweep confirms no other positive
    face dimension ever appears.
    """
    from .bodies import affine_rank

    disk_dims = []
    max_err = 0.0
    for cap in packing.caps:
        rim = _cap_rim_points(cap, count=8)
        max_err = max(max_err, float(np.abs(rim @ cap.normal - cap.offset).max()))
        disk_dims.append(affine_rank(rim[1:] - rim[0]))
    sampled = set()
    for u in rng.sphere_points(seed, 0, directions, 3):
        sampled.add(_hull_face_dim(packing, u))
    for cap in packing.caps[: min(len(packing.caps), 64)]:
        sampled.add(_hull_face_dim(packing, cap.normal))
    return FaceCensus(
        cap_count=len(packing.caps),
        disk_face_count=len(disk_dims),
        disk_face_dims=tuple(disk_dims),
        proper_dims=tuple(sorted({0, *disk_dims})),
        sampled_dims=tuple(sorted(sampled)),
        max_support_error=max_err,
    )
