"""Geometry of the n = 4 eigenvalue simplex at fixed purity.

An orthogonal rotation sends the unit-trace hyperplane to ``z4 = 1/2``; the
remaining three coordinates ``y`` satisfy ``|y|^2 = P - 1/4``, so fixed
purity is a sphere centred on the maximally mixed point.  Positivity
``lam_i >= 0`` cuts it with the four faces of a regular tetrahedron.

The sphere is mapped to the unit disk with the area-preserving azimuthal
projection ``R = sin(theta / 2)``, the pole being the third rotated axis
(the direction of ``(1, 1, 1, -3)``), which is the centre of the ``lam4 = 0``
circle.  The projection is therefore equivariant under permutations of
``lam1, lam2, lam3``; these act on the disk as the symmetries of a triangle.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePoint, InvalidArgument

_S2, _S3, _S6 = math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0)

ROTATION = np.array([
    [1 / _S2, -1 / _S2, 0.0, 0.0],
    [1 / _S6, 1 / _S6, -_S6 / 3, 0.0],
    [1 / (2 * _S3), 1 / (2 * _S3), 1 / (2 * _S3), -_S3 / 2],
    [0.5, 0.5, 0.5, 0.5],
])

POLE_AXIS = 2


def rotation_matrix() -> np.ndarray:
    return ROTATION.copy()


def rotate_to_frame(lam) -> np.ndarray:
    """``R lam``; the last entry is ``tr / 2`` and the first three lie on the
    sphere of radius ``sqrt(P - 1/4)`` for unit trace."""
    lam = np.asarray(lam, dtype=float)
    if lam.shape[-1] != 4:
        raise InvalidArgument("simplex geometry is defined for n = 4")
    return lam @ ROTATION.T


def rotate_from_frame(z) -> np.ndarray:
    """Inverse of :func:`rotate_to_frame`.  A 3-vector gets the unit-trace
    coordinate 1/2 appended."""
    z = np.asarray(z, dtype=float)
    if z.shape[-1] == 3:
        z = np.concatenate([z, np.full(z.shape[:-1] + (1,), 0.5)], axis=-1)
    if z.shape[-1] != 4:
        raise InvalidArgument("expected 3 or 4 frame coordinates")
    return z @ ROTATION


def sphere_radius(P: float) -> float:
    if P < 0.25:
        raise InvalidArgument(f"purity {P} below 1/4")
    return math.sqrt(P - 0.25)


@dataclass(frozen=True)
class FacePlane:
    """Half-space ``normal . y <= offset`` equivalent to ``lam[index] >= 0``."""

    index: int
    normal: np.ndarray
    offset: float

    def contains(self, y, tol: float = 0.0) -> np.ndarray:
        return np.asarray(y) @ self.normal <= self.offset + tol

    def distance(self, y) -> np.ndarray:
        return self.offset - np.asarray(y) @ self.normal


def tetrahedron_faces() -> list[FacePlane]:
    # lam_i = R[:3, i] . y + 1/4, with |R[:3, i]| = sqrt(3)/2
    faces = []
    for i in range(4):
        c = ROTATION[:3, i]
        norm = float(np.linalg.norm(c))
        faces.append(FacePlane(i, -c / norm, 0.25 / norm))
    return faces


INRADIUS = math.sqrt(1.0 / 12.0)
MIDRADIUS = 0.5
CIRCUMRADIUS = _S3 / 2


@dataclass(frozen=True)
class ProjectedPoint:
    R: float | np.ndarray
    phi: float | np.ndarray

    @property
    def xy(self) -> np.ndarray:
        return np.stack([self.R * np.cos(self.phi), self.R * np.sin(self.phi)], axis=-1)


def _frame_axes():
    others = [k for k in range(3) if k != POLE_AXIS]
    return others[0], others[1]


def isometric_project(y) -> ProjectedPoint:
    """Equal-area map of a sphere point to the unit disk, ``R = sin(theta/2)``."""
    y = np.asarray(y, dtype=float)
    r = np.linalg.norm(y, axis=-1)
    if np.any(r <= 1e-14):
        raise DegeneratePoint("the sphere centre has no projection")
    a, b = _frame_axes()
    cos_t = np.clip(y[..., POLE_AXIS] / r, -1.0, 1.0)
    R = np.sqrt((1.0 - cos_t) / 2.0)
    phi = np.arctan2(y[..., b], y[..., a])
    return ProjectedPoint(R, phi)


def project_spectrum(lam) -> np.ndarray:
    """Disk coordinates of unit-trace spectra."""
    return isometric_project(rotate_to_frame(lam)[..., :3]).xy


def unproject(xy, P: float) -> np.ndarray:
    """Spectra (in the original labelling) of disk points at purity ``P``."""
    xy = np.asarray(xy, dtype=float)
    R = np.linalg.norm(xy, axis=-1)
    if np.any(R > 1 + 1e-12):
        raise InvalidArgument("points outside the unit disk")
    R = np.minimum(R, 1.0)
    cos_t = 1.0 - 2.0 * R * R
    sin_t = np.sqrt(np.maximum(1.0 - cos_t ** 2, 0.0))
    phi = np.arctan2(xy[..., 1], xy[..., 0])
    r = sphere_radius(P)
    a, b = _frame_axes()
    y = np.empty(xy.shape[:-1] + (3,))
    y[..., a] = r * sin_t * np.cos(phi)
    y[..., b] = r * sin_t * np.sin(phi)
    y[..., POLE_AXIS] = r * cos_t
    return rotate_from_frame(y)


@dataclass(frozen=True)
class RegionCurve:
    kind: str  # "positivity" or "degeneracy"
    indices: tuple
    segments: list  # list of (k, 2) polylines in the disk

    @property
    def label(self) -> str:
        i = self.indices
        return f"lam{i[0] + 1}=0" if self.kind == "positivity" else f"lam{i[0] + 1}=lam{i[1] + 1}"


def _circle(center_dir: np.ndarray, cos_beta: float, r: float, count: int) -> np.ndarray:
    """Small circle on the sphere of radius ``r`` at angular radius ``beta``
    around ``center_dir``."""
    u = center_dir / np.linalg.norm(center_dir)
    helper = np.eye(3)[np.argmin(np.abs(u))]
    e1 = np.cross(u, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(u, e1)
    t = np.linspace(0.0, 2 * math.pi, count)
    sin_beta = math.sqrt(max(1.0 - cos_beta ** 2, 0.0))
    pts = cos_beta * u + sin_beta * (np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2)
    return r * pts


def _split_at_jumps(xy: np.ndarray, jump: float = 0.5) -> list:
    # a curve through the antipode of the pole wraps across the rim
    cuts = np.nonzero(np.linalg.norm(np.diff(xy, axis=0), axis=1) > jump)[0] + 1
    return [seg for seg in np.split(xy, cuts) if len(seg) > 1]


def trace_region_curves(P: float, resolution: int = 721) -> list[RegionCurve]:
    """Positivity (``lam_i = 0``) and degeneracy (``lam_i = lam_j``) curves in the disk.

    Both families are circles on the purity sphere: positivity curves are
    plane sections at distance ``1/(2 sqrt 3)`` from the centre (present only
    for ``P > 1/3``), degeneracy curves are great circles.
    """
    if not (0.25 < P <= 1.0):
        raise InvalidArgument(f"purity {P} outside (1/4, 1]")
    if resolution < 8:
        raise InvalidArgument("resolution must be at least 8")
    r = sphere_radius(P)
    curves = []
    for face in tetrahedron_faces():
        cos_beta = face.offset / r
        if cos_beta >= 1.0:
            continue
        pts = _circle(face.normal, cos_beta, r, resolution)
        curves.append(RegionCurve("positivity", (face.index,),
                                  _split_at_jumps(isometric_project(pts).xy)))
    for i, j in itertools.combinations(range(4), 2):
        normal = ROTATION[:3, i] - ROTATION[:3, j]
        pts = _circle(normal, 0.0, r, resolution)
        curves.append(RegionCurve("degeneracy", (i, j),
                                  _split_at_jumps(isometric_project(pts).xy)))
    return curves


def region_mask(P: float, resolution: int = 201):
    """Grid over ``[-1, 1]^2``: NaN outside the disk, 0 nonphysical,
    1 physical, 2 physical and sorted ascending."""
    g = np.linspace(-1.0, 1.0, resolution)
    X, Y = np.meshgrid(g, g, indexing="ij")
    xy = np.stack([X, Y], axis=-1)
    inside = np.hypot(X, Y) <= 1.0
    lam = unproject(np.where(inside[..., None], xy, 0.0), P)
    phys = np.all(lam >= 0, axis=-1)
    ordered = phys & np.all(np.diff(lam, axis=-1) >= 0, axis=-1)
    mask = np.where(ordered, 2.0, np.where(phys, 1.0, 0.0))
    return g, np.where(inside, mask, np.nan)


def disk_symmetry(perm) -> np.ndarray:
    """2x2 orthogonal action on the disk of a permutation fixing the last index:
    ``project_spectrum(lam[perm]) == project_spectrum(lam) @ M.T``."""
    perm = tuple(perm)
    if len(perm) != 4 or perm[3] != 3 or sorted(perm) != [0, 1, 2, 3]:
        raise InvalidArgument("only permutations of the first three eigenvalues act on the disk")
    P = np.eye(4)[list(perm)]
    M = ROTATION @ P @ ROTATION.T
    a, b = _frame_axes()
    return M[np.ix_([a, b], [a, b])]
