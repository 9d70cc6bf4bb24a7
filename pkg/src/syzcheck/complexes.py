"""Divisor complexes restricted to a band of dimensions, with boundary maps.

For a configuration A and a bound vector v, the complex has one vertex per
point a with v - a admissible, and a set of points F is a face when the sum
of F stays admissible against v. For the monomial (veronese) presets the
admissibility test is coordinatewise comparison with v; for general
configurations it is semigroup membership of the residual.

Only dimensions inside a requested band [j_lo, j_hi] are materialized, since
one reduced homology rank needs three consecutive dimensions. Faces are
stored per dimension as integer index matrices over the local vertex list,
rows in lexicographic order, which makes face lookups and boundary assembly
pure array operations. Local vertex i is point config.points[vertices[i]].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import CapacityError
from .lattice import PointConfig, Vector, membership_tester

# per-dimension face count guard
DEFAULT_FACE_CAP = 5 * 10**7


@dataclass(frozen=True)
class Face:
    """A single face, as strictly increasing indices into config.points."""

    vertex_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        for x, y in zip(self.vertex_indices, self.vertex_indices[1:]):
            if x >= y:
                raise ValueError("vertex indices must be strictly increasing")

    @property
    def dimension(self) -> int:
        return len(self.vertex_indices) - 1


@dataclass(eq=False)
class ComplexSlice:
    """Faces of one divisor complex with dimension in [j_lo, j_hi].

    faces_by_dim[t] is an (N_t, t+1) int32 matrix of local vertex indices,
    rows lexicographically increasing; dimension -1 is a (1, 0) or (0, 0)
    matrix recording whether the empty face is present (it is, exactly when
    the complex has at least one vertex and the band starts at -1).
    """

    config: PointConfig
    bound: Vector
    j_lo: int
    j_hi: int
    vertices: np.ndarray
    faces_by_dim: dict[int, np.ndarray]
    cone_apex: int | None = None
    _keys: dict[int, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.j_lo, self.j_hi)

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.size)

    def face_count(self, dim: int) -> int:
        if dim not in self.faces_by_dim:
            return 0
        return int(self.faces_by_dim[dim].shape[0])

    def faces(self, dim: int) -> list[Face]:
        """Faces of one dimension with global point indices."""
        if dim not in self.faces_by_dim:
            raise ValueError(f"dimension {dim} outside slice band {self.dims}")
        arr = self.faces_by_dim[dim]
        if dim == -1:
            return [Face(())] * arr.shape[0]
        glob = self.vertices[arr]
        return [Face(tuple(int(x) for x in row)) for row in glob]

    def face_point_sets(self, dim: int) -> list[tuple[Vector, ...]]:
        """Faces of one dimension as tuples of actual points."""
        pts = self.config.points
        return [tuple(pts[i] for i in f.vertex_indices) for f in self.faces(dim)]

    def level_keys(self, dim: int) -> np.ndarray:
        """Strictly increasing int64 key per face (mixed-radix over the local
        vertex count); the key order equals the lexicographic row order."""
        cached = self._keys.get(dim)
        if cached is not None:
            return cached
        arr = self.faces_by_dim[dim]
        keys = _encode_rows(arr, self.vertex_count)
        self._keys[dim] = keys
        return keys

    def subface_rows(self, dim: int) -> np.ndarray:
        """(N_dim, dim+1) matrix: entry [f, i] is the row index, in dimension
        dim-1, of face f with its i-th vertex removed. For dim 0 this is a
        single column of zeros pointing at the empty face."""
        if dim - 1 not in self.faces_by_dim or dim not in self.faces_by_dim:
            raise ValueError(f"boundary at dimension {dim} needs dims {dim - 1} and {dim}")
        n_faces = self.face_count(dim)
        if dim == 0:
            if self.face_count(-1) == 0 and n_faces > 0:
                raise ValueError("empty face missing below a nonempty vertex set")
            return np.zeros((n_faces, 1), dtype=np.int64)
        faces = self.faces_by_dim[dim]
        below = self.level_keys(dim - 1)
        width = dim + 1
        v_count = self.vertex_count
        if n_faces == 0:
            return np.zeros((0, width), dtype=np.int64)
        keys = self.level_keys(dim)
        out = np.empty((n_faces, width), dtype=np.int64)
        radix = np.int64(v_count)
        for i in range(width):
            hi_base = radix ** np.int64(width - i)
            lo_base = radix ** np.int64(width - 1 - i)
            sub = (keys // hi_base) * lo_base + (keys % lo_base)
            pos = np.searchsorted(below, sub)
            if pos.size and (pos >= below.size).any():
                raise RuntimeError("band is not closed downward")
            if not np.array_equal(below[pos], sub):
                raise RuntimeError("band is not closed downward")
            out[:, i] = pos
        return out


@dataclass(frozen=True, eq=False)
class BoundaryMatrix:
    """Sparse matrix with entries in {+1, -1}, triplet storage.

    Also reused as the container for any signed sparse matrix fed to the
    rank engines (Koszul differentials have the same shape of data).
    """

    rows: int
    cols: int
    row_idx: np.ndarray
    col_idx: np.ndarray
    values: np.ndarray

    @property
    def entries(self) -> list[tuple[int, int, int]]:
        return [(int(r), int(c), int(v))
                for r, c, v in zip(self.row_idx, self.col_idx, self.values)]

    @property
    def nnz(self) -> int:
        return int(self.row_idx.size)

    def to_scipy(self):
        from scipy.sparse import csr_matrix

        return csr_matrix(
            (self.values.astype(np.int64), (self.row_idx, self.col_idx)),
            shape=(self.rows, self.cols),
        )

    def to_text(self) -> str:
        """Triplet export, one 'row col value' line per entry."""
        return "\n".join(f"{int(r)} {int(c)} {int(v)}"
                         for r, c, v in zip(self.row_idx, self.col_idx, self.values))


def make_matrix(rows: int, cols: int,
                triplets: Sequence[tuple[int, int, int]]) -> BoundaryMatrix:
    """Build a BoundaryMatrix container from (row, col, value) triplets."""
    if triplets:
        r, c, v = zip(*triplets)
    else:
        r, c, v = (), (), ()
    return BoundaryMatrix(
        rows=rows,
        cols=cols,
        row_idx=np.asarray(r, dtype=np.int64),
        col_idx=np.asarray(c, dtype=np.int64),
        values=np.asarray(v, dtype=np.int64),
    )


def _encode_rows(arr: np.ndarray, vertex_count: int) -> np.ndarray:
    """Mixed-radix int64 key per row; strictly monotone w.r.t. lex order."""
    n, width = arr.shape
    if width == 0:
        return np.zeros(n, dtype=np.int64)
    if vertex_count and vertex_count ** width >= 2**63:
        raise CapacityError("face keys exceed 64-bit range for this vertex count")
    keys = np.zeros(n, dtype=np.int64)
    radix = np.int64(max(vertex_count, 1))
    for i in range(width):
        keys = keys * radix + arr[:, i].astype(np.int64)
    return keys


def _expand_level(cur: np.ndarray, sums: np.ndarray, local_points: np.ndarray,
                  bound: np.ndarray, cap: int) -> tuple[np.ndarray, np.ndarray]:
    """One level of face extension: parents (N, k) to children (M, k+1).

    A child is parent + vertex w with w greater than the parent's last vertex
    and the extended sum still under the bound. Children come out in
    lexicographic order because parents are lexicographic and appending a
    vertex preserves prefix order.
    """
    n, k = cur.shape
    v_count = local_points.shape[0]
    if n == 0:
        return (np.zeros((0, k + 1), dtype=cur.dtype),
                np.zeros((0, sums.shape[1]), dtype=sums.dtype))
    last = cur[:, -1]
    parent_blocks: list[np.ndarray] = []
    vert_blocks: list[np.ndarray] = []
    total = 0
    for w in range(v_count):
        resid = bound - local_points[w]
        if (resid < 0).any():
            continue
        cand = (last < w) & (sums <= resid).all(axis=1)
        rows = np.flatnonzero(cand)
        if rows.size == 0:
            continue
        total += int(rows.size)
        if total > cap:
            raise CapacityError(f"face count exceeds cap {cap} during expansion")
        parent_blocks.append(rows)
        vert_blocks.append(np.full(rows.size, w, dtype=cur.dtype))
    if not parent_blocks:
        return (np.zeros((0, k + 1), dtype=cur.dtype),
                np.zeros((0, sums.shape[1]), dtype=sums.dtype))
    parents = np.concatenate(parent_blocks)
    verts = np.concatenate(vert_blocks)
    order = np.lexsort((verts, parents))
    parents = parents[order]
    verts = verts[order]
    children = np.hstack([cur[parents], verts[:, None]])
    child_sums = sums[parents] + local_points[verts]
    return children, child_sums


def _faces_general(config: PointConfig, bound: Vector, j_hi: int,
                   cap: int) -> tuple[list[int], dict[int, list[tuple[int, ...]]]]:
    """Depth-first enumeration under the semigroup-membership residual rule."""
    member = membership_tester(config)
    pts = config.points
    residuals = [tuple(b - a for b, a in zip(bound, p)) for p in pts]
    vertex_ids = [i for i, r in enumerate(residuals)
                  if all(x >= 0 for x in r) and member(r)]
    local_points = [pts[i] for i in vertex_ids]
    v_count = len(vertex_ids)
    by_dim: dict[int, list[tuple[int, ...]]] = {t: [] for t in range(j_hi + 1)}
    total = 0

    def extend(prefix: tuple[int, ...], resid: tuple[int, ...]) -> None:
        nonlocal total
        t = len(prefix) - 1
        by_dim[t].append(prefix)
        total += 1
        if total > cap:
            raise CapacityError(f"face count exceeds cap {cap} during expansion")
        if t == j_hi:
            return
        for w in range(prefix[-1] + 1, v_count):
            nxt = tuple(x - y for x, y in zip(resid, local_points[w]))
            if all(x >= 0 for x in nxt) and member(nxt):
                extend(prefix + (w,), nxt)

    if j_hi >= 0:
        for w in range(v_count):
            resid = tuple(x - y for x, y in zip(bound, local_points[w]))
            if all(x >= 0 for x in resid) and member(resid):
                extend((w,), resid)
    return vertex_ids, by_dim


def _find_cone_apex(faces_by_dim: dict[int, np.ndarray],
                    sums_by_dim: dict[int, np.ndarray],
                    local_points: np.ndarray, bound: np.ndarray,
                    j_hi: int, member=None) -> int | None:
    """A local vertex w is an apex when every stored face of dimension at
    most j_hi - 1 not containing w extends by w inside the bound. Such a
    vertex cones the complex through dimension j_hi - 1, so reduced homology
    vanishes there. `member` is the residual admissibility test for general
    configurations; None means coordinatewise comparison suffices."""
    v_count = local_points.shape[0]
    candidates = list(range(v_count))
    for t in range(0, j_hi):
        faces = faces_by_dim.get(t)
        if faces is None or faces.shape[0] == 0:
            continue
        sums = sums_by_dim[t]
        surviving = []
        for w in candidates:
            outside = ~(faces == w).any(axis=1)
            if not outside.any():
                surviving.append(w)
                continue
            resid = bound - local_points[w]
            if (resid < 0).any():
                continue
            if not (sums[outside] <= resid).all():
                continue
            if member is not None:
                leftovers = resid - sums[outside]
                if not all(member(tuple(int(x) for x in row)) for row in leftovers):
                    continue
            surviving.append(w)
        candidates = surviving
        if not candidates:
            return None
    return candidates[0] if candidates else None


def build_slice(config: PointConfig, bound: Sequence[int], j_lo: int, j_hi: int,
                *, max_faces: int = DEFAULT_FACE_CAP,
                find_cone_apex: bool = False) -> ComplexSlice:
    """Materialize the faces of the divisor complex with dims in [j_lo, j_hi].

    Args:
        config: the point configuration.
        bound: nonnegative bound vector of matching length.
        j_lo: lowest dimension kept, at least -1.
        j_hi: highest dimension kept.
        max_faces: per-dimension face count guard.
        find_cone_apex: scan for a vertex coning all dims below j_hi; if one
            exists the slice records it and homology in [j_lo+1, j_hi-1] is
            known to vanish without linear algebra.

    Raises:
        CapacityError: projected face count exceeds max_faces.
    """
    if j_lo < -1:
        raise ValueError("j_lo must be >= -1")
    if j_hi < j_lo:
        raise ValueError("j_hi must be >= j_lo")
    bb = tuple(int(x) for x in bound)
    if len(bb) != config.ambient_dim:
        raise ValueError("bound vector has wrong length")
    if any(x < 0 for x in bb):
        raise ValueError("bound vector must be nonnegative")

    faces_by_dim: dict[int, np.ndarray] = {}
    sums_by_dim: dict[int, np.ndarray] = {}

    if config.kind == "veronese":
        pts = np.asarray(config.points, dtype=np.int64)
        barr = np.asarray(bb, dtype=np.int64)
        if sum(bb) % config.d != 0:
            # residuals b - sum(F) all miss the divisibility condition, so no
            # subset is a face and the complex is void
            vertices = np.zeros(0, dtype=np.int64)
        else:
            vertices = np.flatnonzero((pts <= barr).all(axis=1)).astype(np.int64)
        local_points = pts[vertices]
        v_count = int(vertices.size)
        if v_count > max_faces:
            raise CapacityError(f"vertex count exceeds cap {max_faces}")
        cur = np.arange(v_count, dtype=np.int32).reshape(v_count, 1)
        cur_sums = local_points.copy()
        for t in range(0, j_hi + 1):
            if t > 0:
                cur, cur_sums = _expand_level(cur, cur_sums, local_points, barr, max_faces)
            if j_lo <= t:
                faces_by_dim[t] = cur
                sums_by_dim[t] = cur_sums
            elif find_cone_apex:
                sums_by_dim[t] = cur_sums
                faces_by_dim.setdefault(t, cur)
            if cur.shape[0] == 0:
                for rest in range(t + 1, j_hi + 1):
                    if j_lo <= rest:
                        faces_by_dim[rest] = np.zeros((0, rest + 1), dtype=np.int32)
                break
    else:
        vertex_ids, by_dim = _faces_general(config, bb, j_hi, max_faces)
        vertices = np.asarray(vertex_ids, dtype=np.int64)
        local_points = np.asarray([config.points[i] for i in vertex_ids],
                                  dtype=np.int64).reshape(len(vertex_ids), config.ambient_dim)
        v_count = int(vertices.size)
        for t in range(0, j_hi + 1):
            rows = by_dim.get(t, [])
            arr = np.asarray(rows, dtype=np.int32).reshape(len(rows), t + 1)
            if j_lo <= t or find_cone_apex:
                faces_by_dim[t] = arr
                if arr.shape[0]:
                    sums_by_dim[t] = local_points[arr].sum(axis=1)
                else:
                    sums_by_dim[t] = np.zeros((0, config.ambient_dim), dtype=np.int64)

    if j_lo == -1:
        # the empty face is present exactly when the bound itself lies in
        # the semigroup (downward closure makes this imply every vertex case)
        empty_count = 1 if membership_tester(config)(bb) else 0
        faces_by_dim[-1] = np.zeros((empty_count, 0), dtype=np.int32)

    apex: int | None = None
    if find_cone_apex and v_count > 0:
        barr = np.asarray(bb, dtype=np.int64)
        member = None if config.kind == "veronese" else membership_tester(config)
        apex = _find_cone_apex(faces_by_dim, sums_by_dim, local_points, barr,
                               j_hi, member)

    # drop dimensions materialized only for the apex scan
    faces_by_dim = {t: a for t, a in faces_by_dim.items() if j_lo <= t <= j_hi}
    for t in range(max(j_lo, 0), j_hi + 1):
        faces_by_dim.setdefault(t, np.zeros((0, t + 1), dtype=np.int32))

    return ComplexSlice(config=config, bound=bb, j_lo=j_lo, j_hi=j_hi,
                        vertices=vertices, faces_by_dim=faces_by_dim,
                        cone_apex=apex)


def boundary_matrix(slice_: ComplexSlice, j: int) -> BoundaryMatrix:
    """The boundary map from dimension j to dimension j-1 of the slice.

    Columns follow faces_by_dim[j] order; the entry for dropping the i-th
    vertex of a face has sign (-1)^i. Dimension 0 maps every vertex to the
    empty face with coefficient +1 (reduced convention).
    """
    if j < slice_.j_lo + 1 or j > slice_.j_hi:
        raise ValueError(f"boundary at {j} needs dims {j - 1} and {j} inside {slice_.dims}")
    rows = slice_.face_count(j - 1)
    cols = slice_.face_count(j)
    width = j + 1 if j >= 1 else 1
    if cols == 0:
        return BoundaryMatrix(rows=rows, cols=cols,
                              row_idx=np.zeros(0, dtype=np.int64),
                              col_idx=np.zeros(0, dtype=np.int64),
                              values=np.zeros(0, dtype=np.int64))
    sub = slice_.subface_rows(j)
    row_idx = sub.ravel().astype(np.int64)
    col_idx = np.repeat(np.arange(cols, dtype=np.int64), width)
    sign_row = np.array([1 if i % 2 == 0 else -1 for i in range(width)], dtype=np.int64)
    values = np.tile(sign_row, cols)
    return BoundaryMatrix(rows=rows, cols=cols, row_idx=row_idx,
                          col_idx=col_idx, values=values)


def slice_to_text(slice_: ComplexSlice) -> str:
    """Face listing, one 'dim: i1 i2 ... ik' line per face, global indices."""
    lines = []
    for t in range(slice_.j_lo, slice_.j_hi + 1):
        if t == -1:
            for _ in range(slice_.face_count(-1)):
                lines.append("-1:")
            continue
        glob = slice_.vertices[slice_.faces_by_dim[t]]
        for row in glob:
            lines.append(f"{t}: " + " ".join(str(int(x)) for x in row))
    return "\n".join(lines)


def slice_to_json(slice_: ComplexSlice) -> dict:
    """Summary {bound, dims, face_counts}."""
    return {
        "bound": list(slice_.bound),
        "dims": [slice_.j_lo, slice_.j_hi],
        "face_counts": {str(t): slice_.face_count(t)
                        for t in range(slice_.j_lo, slice_.j_hi + 1)},
    }
