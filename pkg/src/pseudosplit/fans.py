"""Smooth Kato fans embedded in a lattice Z^d.

A fan is a list of primitive ray vectors and a list of simplicial cones
(tuples of ray indices); every subset of a cone is a face and the empty face
is the vertex.  An N-point is a nonnegative integer combination of the rays
of one cone, normalised so that every coordinate is positive.  Ray indices
are never renumbered: subdivisions only append new rays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from math import gcd
from typing import Iterator, Mapping, Sequence

import numpy as np
from scipy.optimize import linprog

from .intmath import maximal_minor_gcd

Cone = tuple[int, ...]

DEFAULT_HEIGHT_CAP = 8


class FanError(ValueError):
    pass


class SmoothKatoFan:
    def __init__(self, dim: int, rays: Sequence[Sequence[int]], cones: Sequence[Sequence[int]]):
        if dim < 1:
            raise FanError("ambient dimension must be positive")
        self.dim = dim
        self.rays: tuple[tuple[int, ...], ...] = tuple(tuple(int(x) for x in r) for r in rays)
        for i, r in enumerate(self.rays):
            if len(r) != dim:
                raise FanError(f"ray {i} has {len(r)} coordinates, expected {dim}")
        cs = []
        for c in cones:
            c = tuple(int(i) for i in c)
            for i in c:
                if not 0 <= i < len(self.rays):
                    raise FanError(f"cone {list(c)} refers to missing ray {i}")
            if len(set(c)) != len(c):
                raise FanError(f"cone {list(c)} repeats a ray")
            cs.append(c)
        # order as given; morphism matrices index columns by it
        self.cones: tuple[Cone, ...] = tuple(cs)

    def __repr__(self):
        return f"SmoothKatoFan(dim={self.dim}, rays={len(self.rays)}, maximal_cones={len(self.maximal_cones)})"

    def __eq__(self, other):
        if not isinstance(other, SmoothKatoFan):
            return NotImplemented
        return (self.dim, self.rays, set(self.maximal_cones)) == (other.dim, other.rays, set(other.maximal_cones))

    def __hash__(self):
        return hash((self.dim, self.rays, frozenset(self.maximal_cones)))

    @cached_property
    def maximal_cones(self) -> tuple[Cone, ...]:
        cands = {tuple(sorted(c)) for c in self.cones if c}
        used = {i for c in cands for i in c}
        cands |= {(i,) for i in range(len(self.rays)) if i not in used}
        proper = {f for c in cands for k in range(1, len(c)) for f in combinations(c, k)}
        return tuple(sorted(cands - proper, key=lambda c: (len(c), c)))

    @cached_property
    def faces(self) -> tuple[Cone, ...]:
        out = {()}
        for c in self.maximal_cones:
            for k in range(1, len(c) + 1):
                out.update(combinations(c, k))
        return tuple(sorted(out, key=lambda c: (len(c), c)))

    @cached_property
    def _face_set(self) -> frozenset[Cone]:
        return frozenset(self.faces)

    def is_face(self, cone: Sequence[int]) -> bool:
        return tuple(sorted(cone)) in self._face_set

    def vector(self, p: FanPoint) -> tuple[int, ...]:
        v = [0] * self.dim
        for i, a in zip(p.cone, p.coords):
            for k, x in enumerate(self.rays[i]):
                v[k] += a * x
        return tuple(v)

    def to_json(self) -> dict:
        return {"dim": self.dim, "rays": [list(r) for r in self.rays],
                "cones": [list(c) for c in self.maximal_cones]}


@dataclass(frozen=True, order=True)
class FanPoint:
    """An N-point: ``sum(coords[k] * ray[cone[k]])`` with all coords >= 1."""

    cone: Cone
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.cone) != len(self.coords):
            raise FanError("a fan point needs one coordinate per ray of its cone")
        if any(a < 1 for a in self.coords):
            raise FanError("fan point coordinates must be positive; drop zero coordinates")
        if list(self.cone) != sorted(set(self.cone)):
            raise FanError("fan point cone must be a sorted tuple of distinct rays")

    @classmethod
    def from_mapping(cls, coeffs: Mapping[int, int]) -> FanPoint:
        items = sorted((int(i), int(a)) for i, a in coeffs.items() if a != 0)
        if any(a < 0 for _, a in items):
            raise FanError("fan point coordinates must be nonnegative")
        return cls(tuple(i for i, _ in items), tuple(a for _, a in items))

    @classmethod
    def zero(cls) -> FanPoint:
        return cls((), ())

    def as_mapping(self) -> dict[int, int]:
        return dict(zip(self.cone, self.coords))

    @property
    def height(self) -> int:
        return sum(self.coords)

    def to_json(self) -> dict:
        return {"cone": list(self.cone), "coords": list(self.coords)}


def height(p: FanPoint) -> int:
    return p.height


def positive_compositions(k: int, total: int) -> Iterator[tuple[int, ...]]:
    """Tuples of k positive integers summing to ``total``, lexicographically."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - k + 2):
        for rest in positive_compositions(k - 1, total - first):
            yield (first,) + rest


def points_on_cone(cone: Cone, h: int) -> Iterator[FanPoint]:
    for coords in positive_compositions(len(cone), h):
        yield FanPoint(cone, coords)


def enumerate_points(f: SmoothKatoFan, max_height: int) -> list[FanPoint]:
    if max_height < 0:
        raise ValueError("max height must be nonnegative")
    pts = [p for c in f.faces for h in range(len(c), max_height + 1) for p in points_on_cone(c, h)]
    return sorted(pts, key=lambda p: (p.height, len(p.cone), p.cone, p.coords))


@dataclass
class FanValidation:
    valid: bool
    violations: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"valid": self.valid, "violations": list(self.violations)}


def _improper_overlap(f: SmoothKatoFan, c1: Cone, c2: Cone) -> bool:
    """Whether cone(c1) meets cone(c2) outside the face spanned by their shared rays."""
    shared = set(c1) & set(c2)
    only1 = [i for i in c1 if i not in shared]
    if not only1:
        return False
    r1 = np.array([f.rays[i] for i in c1], dtype=float).T
    r2 = np.array([f.rays[i] for i in c2], dtype=float).T
    a_eq = np.vstack([
        np.hstack([r1, -r2]),
        np.hstack([[1.0 if i in only1 else 0.0 for i in c1], np.zeros(len(c2))]),
    ])
    b_eq = np.concatenate([np.zeros(f.dim), [1.0]])
    res = linprog(np.zeros(len(c1) + len(c2)), A_eq=a_eq, b_eq=b_eq,
                  bounds=[(0, None)] * (len(c1) + len(c2)), method="highs")
    return res.status == 0


def _unseparated_pairs(f: SmoothKatoFan) -> list[tuple[Cone, Cone]]:
    """Pairs of maximal cones not yet known to meet properly.

    A full-dimensional unimodular cone has an integral dual basis; row i is a
    facet normal w, nonnegative on the cone and zero on every ray but i.  If
    each ray of the other cone either has w < 0 or is one of those zero rays,
    the two cones meet inside a common face.  Pairs this exact test cannot
    settle are left for the linear program.
    """
    cones = f.maximal_cones
    rays = np.array(f.rays, dtype=np.int64).reshape(len(f.rays), f.dim)
    full = [len(c) == f.dim for c in cones]
    settled = np.zeros((len(cones), len(cones)), dtype=bool)
    if any(full):
        idx = np.array([c for c, fl in zip(cones, full) if fl], dtype=np.int64)
        pos = [k for k, fl in enumerate(full) if fl]
        for a, c1 in zip(pos, idx):
            dual = np.rint(np.linalg.inv(rays[c1].T.astype(float))).astype(np.int64)
            vals = dual @ rays.T
            for i in range(f.dim):
                ok = vals[i] < 0
                ok[np.delete(c1, i)] = True
                hit = np.all(ok[idx], axis=1)
                settled[a, pos] |= hit
                settled[pos, a] |= hit
    return [(cones[a], cones[b]) for a, b in combinations(range(len(cones)), 2) if not settled[a, b]]


def validate_smooth_fan(f: SmoothKatoFan) -> FanValidation:
    bad = []
    for i, r in enumerate(f.rays):
        g = 0
        for x in r:
            g = gcd(g, x)
        if g != 1:
            bad.append(f"ray {i} {list(r)} is not primitive")
    seen: dict[tuple[int, ...], int] = {}
    for i, r in enumerate(f.rays):
        if r in seen:
            bad.append(f"rays {seen[r]} and {i} coincide")
        seen.setdefault(r, i)
    for c in f.maximal_cones:
        g = maximal_minor_gcd([f.rays[i] for i in c])
        if g != 1:
            what = "linearly dependent" if g == 0 else f"index {g}"
            bad.append(f"cone {list(c)} is not unimodular ({what})")
    if not bad:
        for c1, c2 in _unseparated_pairs(f):
            if _improper_overlap(f, c1, c2) or _improper_overlap(f, c2, c1):
                shared = sorted(set(c1) & set(c2))
                bad.append(f"cones {list(c1)} and {list(c2)} do not meet along their common face {shared}")
    return FanValidation(not bad, bad)


class FanMorphism:
    """A map of fans that is linear on each cone.

    ``ray_images[j]`` gives the image of source ray j as a nonnegative
    combination ``{target ray: multiplicity}`` of rays of one target cone.
    For a source cone s the matrix (m_ij) has rows indexed by the rays of its
    image cone and columns by the rays of s.
    """

    def __init__(self, source: SmoothKatoFan, target: SmoothKatoFan,
                 ray_images: Sequence[Mapping[int, int]]):
        if len(ray_images) != len(source.rays):
            raise FanError(f"{len(ray_images)} ray images for {len(source.rays)} source rays")
        imgs = []
        for j, img in enumerate(ray_images):
            clean = {int(i): int(m) for i, m in img.items() if m != 0}
            if any(m < 0 for m in clean.values()):
                raise FanError(f"image of source ray {j} has a negative multiplicity")
            for i in clean:
                if not 0 <= i < len(target.rays):
                    raise FanError(f"image of source ray {j} refers to missing target ray {i}")
            imgs.append(dict(sorted(clean.items())))
        self.source = source
        self.target = target
        self.ray_images: tuple[dict[int, int], ...] = tuple(imgs)
        for c in source.maximal_cones:
            t = self.cone_image(c)
            if not target.is_face(t):
                raise FanError(f"source cone {list(c)} maps onto {list(t)}, which is not a target cone")

    @classmethod
    def from_matrices(cls, source: SmoothKatoFan, target: SmoothKatoFan,
                      cone_map: Sequence[Sequence[int]], matrices: Sequence[Sequence[Sequence[int]]]
                      ) -> FanMorphism:
        """Build from per-cone data aligned with ``source.cones``.

        ``cone_map[k]`` lists the target rays indexing the rows of
        ``matrices[k]``; its columns follow the rays of ``source.cones[k]``.
        """
        if len(cone_map) != len(source.cones) or len(matrices) != len(source.cones):
            raise FanError("cone_map and matrices need one entry per source cone")
        images: dict[int, dict[int, int]] = {}
        for k, (sc, tc, mat) in enumerate(zip(source.cones, cone_map, matrices)):
            tc = [int(i) for i in tc]
            if not target.is_face(tc):
                raise FanError(f"cone_map[{k}] = {tc} is not a target cone")
            if len(mat) != len(tc) or any(len(row) != len(sc) for row in mat):
                raise FanError(f"matrix {k} must be {len(tc)} x {len(sc)}")
            for col, j in enumerate(sc):
                img = {i: int(mat[row][col]) for row, i in enumerate(tc) if mat[row][col] != 0}
                if j in images and images[j] != img:
                    raise FanError(f"matrices disagree on the image of source ray {j}")
                images[j] = img
        missing = [j for j in range(len(source.rays)) if j not in images]
        if missing:
            raise FanError(f"no image given for source rays {missing}")
        return cls(source, target, [images[j] for j in range(len(source.rays))])

    @classmethod
    def identity(cls, f: SmoothKatoFan) -> FanMorphism:
        return cls(f, f, [{j: 1} for j in range(len(f.rays))])

    def cone_image(self, cone: Sequence[int]) -> Cone:
        return tuple(sorted({i for j in cone for i in self.ray_images[j]}))

    def matrix(self, cone: Sequence[int]) -> tuple[Cone, list[list[int]]]:
        t = self.cone_image(cone)
        return t, [[self.ray_images[j].get(i, 0) for j in cone] for i in t]

    def to_json(self) -> dict:
        cone_map, mats = [], []
        for c in self.source.cones:
            t, m = self.matrix(c)
            cone_map.append(list(t))
            mats.append(m)
        return {"cone_map": cone_map, "matrices": mats}


def apply_morphism(m: FanMorphism, p: FanPoint) -> FanPoint:
    if not m.source.is_face(p.cone):
        raise FanError(f"point on {list(p.cone)}, which is not a source cone")
    r: dict[int, int] = {}
    for j, a in zip(p.cone, p.coords):
        for i, mij in m.ray_images[j].items():
            r[i] = r.get(i, 0) + mij * a
    return FanPoint.from_mapping(r)


def compose(first: FanMorphism, second: FanMorphism) -> FanMorphism:
    """``first`` after ``second``."""
    if second.target != first.source:
        raise FanError("morphisms do not compose")
    imgs = []
    for img in second.ray_images:
        out: dict[int, int] = {}
        for k, a in img.items():
            for i, b in first.ray_images[k].items():
                out[i] = out.get(i, 0) + a * b
        imgs.append(out)
    return FanMorphism(second.source, first.target, imgs)


@dataclass(frozen=True)
class Subdivision:
    """A proper subdivision ``refined -> base`` built from star subdivisions.

    ``steps`` records each star as (center cone, index of the new ray), in
    the order applied.
    """

    refined: SmoothKatoFan
    base: SmoothKatoFan
    morphism: FanMorphism
    steps: tuple[tuple[Cone, int], ...] = ()

    @classmethod
    def identity(cls, f: SmoothKatoFan) -> Subdivision:
        return cls(f, f, FanMorphism.identity(f), ())

    def then(self, other: Subdivision) -> Subdivision:
        """Refine further by ``other``, a subdivision of ``self.refined``."""
        return Subdivision(other.refined, self.base, compose(self.morphism, other.morphism),
                           self.steps + other.steps)

    def to_json(self) -> dict:
        return {"refined": self.refined.to_json(),
                "new_rays": {str(u): {str(i): a for i, a in self.morphism.ray_images[u].items()}
                             for _, u in self.steps},
                "steps": [{"center": list(c), "new_ray": u} for c, u in self.steps]}


def _star_cones(cones: list[Cone], c: Cone, u: int) -> list[Cone]:
    cs = set(c)
    out = []
    for sigma in cones:
        if cs.issubset(sigma):
            for r in c:
                out.append(tuple(sorted([i for i in sigma if i != r] + [u])))
        else:
            out.append(sigma)
    return out


def _subdivide(f: SmoothKatoFan, centers: Sequence[Cone]) -> Subdivision:
    """Star subdivide ``f`` at each center in turn (each must be a cone when reached)."""
    rays = list(f.rays)
    cones = list(f.maximal_cones)
    images: list[dict[int, int]] = [{j: 1} for j in range(len(rays))]
    steps = []
    for c in centers:
        u = len(rays)
        rays.append(tuple(sum(rays[i][k] for i in c) for k in range(f.dim)))
        img: dict[int, int] = {}
        for i in c:
            for b, a in images[i].items():
                img[b] = img.get(b, 0) + a
        images.append(img)
        cones = _star_cones(cones, c, u)
        steps.append((c, u))
    refined = SmoothKatoFan(f.dim, rays, cones)
    return Subdivision(refined, f, FanMorphism(refined, f, images), tuple(steps))


def star_subdivision(f: SmoothKatoFan, c: Sequence[int]) -> Subdivision:
    c = tuple(sorted(c))
    if len(c) < 2:
        raise FanError("star subdivision needs a cone with at least two rays")
    if not f.is_face(c):
        raise FanError(f"{list(c)} is not a cone of the fan")
    return _subdivide(f, [c])


def barycentric_subdivision(f: SmoothKatoFan) -> Subdivision:
    """Star subdivide every cone of dimension >= 2, largest first.

    A cone of the original fan is still a cone when its turn comes, since
    only cones strictly containing it have been subdivided before.
    """
    centers = sorted((c for c in f.faces if len(c) >= 2), key=lambda c: (-len(c), c))
    return _subdivide(f, centers)


def iterated_barycentric(f: SmoothKatoFan, m: int) -> Subdivision:
    """``m - 1`` successive barycentric subdivisions."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    sub = Subdivision.identity(f)
    for _ in range(m - 1):
        sub = sub.then(barycentric_subdivision(sub.refined))
    return sub


def pullback_point(s: Subdivision, p: FanPoint) -> FanPoint:
    """The unique point of the refined fan lying over ``p``."""
    if not s.base.is_face(p.cone):
        raise FanError(f"point on {list(p.cone)}, which is not a base cone")
    coeffs = p.as_mapping()
    for center, u in s.steps:
        if all(i in coeffs for i in center):
            k = min(coeffs[i] for i in center)
            for i in center:
                coeffs[i] -= k
                if coeffs[i] == 0:
                    del coeffs[i]
            coeffs[u] = k
    return FanPoint.from_mapping(coeffs)


def pushforward_point(s: Subdivision, p: FanPoint) -> FanPoint:
    return apply_morphism(s.morphism, p)


def is_single_ray(p: FanPoint) -> bool:
    return len(p.cone) <= 1


# --- the height bound m ---------------------------------------------------

def preimage_point(phi: FanMorphism, r: FanPoint) -> FanPoint | None:
    """Some source point mapping to ``r``, or None if ``r`` is not in the image.

    Solved exactly per source cone as M a = r over nonnegative integers.
    Columns that vanish contribute nothing and are left at zero.
    """
    target = r.as_mapping()
    support = set(target)
    for sigma in phi.source.maximal_cones:
        cols = [(j, phi.ray_images[j]) for j in sigma
                if phi.ray_images[j] and set(phi.ray_images[j]) <= support]
        covered = {i for _, img in cols for i in img}
        if covered != support:
            continue
        sol = _solve_nonneg(cols, dict(target))
        if sol is not None:
            return FanPoint.from_mapping(sol)
    return None


def _solve_nonneg(cols: list[tuple[int, dict[int, int]]], rem: dict[int, int]) -> dict[int, int] | None:
    if not cols:
        return {} if all(v == 0 for v in rem.values()) else None
    (j, img), rest = cols[0], cols[1:]
    still = {i for _, im in rest for i in im}
    bound = min(rem[i] // m for i, m in img.items())
    for a in range(bound, -1, -1):
        nxt = dict(rem)
        for i, m in img.items():
            nxt[i] -= a * m
        if any(v > 0 and i not in still for i, v in nxt.items()):
            continue
        sol = _solve_nonneg(rest, nxt)
        if sol is not None:
            if a:
                sol[j] = a
            return sol
    return None


def in_image(phi: FanMorphism, r: FanPoint) -> bool:
    return preimage_point(phi, r) is not None


@dataclass(frozen=True)
class HeightBound:
    m: int
    target_rows: tuple[dict, ...]
    pair_rows: tuple[dict, ...]
    cap: int

    @property
    def complete(self) -> bool:
        """False if some m_t = 0 rests on a search capped at ``cap``."""
        return all(row["status"] != "searched" for row in self.target_rows)

    def to_json(self) -> dict:
        return {"m": self.m, "complete": self.complete, "cap": self.cap,
                "m_t": list(self.target_rows), "m_st": list(self.pair_rows)}


def height_bound_m(phi: FanMorphism, cap: int = DEFAULT_HEIGHT_CAP) -> HeightBound:
    """m = max over strata of m_t and m_{s,t}.

    m_t is the least height of a point with support exactly t that is not in
    the image, searched up to ``cap``; status is "witness" when found,
    "exhausted" when t has no points beyond those checked (the vertex), and
    "searched" when nothing turned up below the cap.  m_{s,t} is the height of
    the image of the all-ones point of s, which is the least image height of
    a full-support point of s since the multiplicities are nonnegative.
    """
    if cap < 1:
        raise ValueError("height cap must be at least 1")
    t_rows = []
    for t in phi.target.faces:
        row = {"cone": list(t), "m_t": 0, "status": "searched", "witness": None}
        if not t:
            row["status"] = "exhausted"  # only the zero point, image of the source vertex
        for h in range(len(t), cap + 1) if t else ():
            hit = next((r for r in points_on_cone(t, h) if not in_image(phi, r)), None)
            if hit is not None:
                row.update(m_t=h, status="witness", witness=list(hit.coords))
                break
        t_rows.append(row)
    st_rows = []
    for s in phi.source.faces:
        t, mat = phi.matrix(s)
        st_rows.append({"source": list(s), "target": list(t), "m_st": sum(map(sum, mat))})
    m = max([r["m_t"] for r in t_rows] + [r["m_st"] for r in st_rows])
    return HeightBound(m, tuple(t_rows), tuple(st_rows), cap)
