"""Divisor complex slices and boundary matrices."""

import numpy as np
import pytest

from syzcheck.complexes import (
    BoundaryMatrix,
    Face,
    boundary_matrix,
    build_slice,
    make_matrix,
    slice_to_json,
    slice_to_text,
)
from syzcheck.errors import CapacityError
from syzcheck.lattice import enumerate_multidegrees, general_config, veronese_points


def faces_as_point_sets(slc, dim):
    return {frozenset(f) for f in slc.face_point_sets(dim)}


def line_triple():
    # 1-dimensional semigroup: membership is every nonnegative integer,
    # so faces are exactly the subsets with coordinate sum <= bound
    return general_config([(1,), (2,), (3,)])


def test_line_cubic_bound_33_slice():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (3, 3), -1, 1)
    assert slc.vertex_count == 4
    assert slc.face_count(-1) == 1
    assert slc.face_count(0) == 4
    assert faces_as_point_sets(slc, 1) == {
        frozenset({(3, 0), (0, 3)}),
        frozenset({(2, 1), (1, 2)}),
    }


def test_line_cubic_bound_42_slice():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (4, 2), 0, 1)
    assert faces_as_point_sets(slc, 0) == {
        frozenset({(3, 0)}), frozenset({(2, 1)}), frozenset({(1, 2)}),
    }
    assert faces_as_point_sets(slc, 1) == {frozenset({(3, 0), (1, 2)})}
    assert -1 not in slc.faces_by_dim


def test_zero_bound_keeps_only_the_empty_face():
    # zero lies in every semigroup, so the complex is {empty face}, not void
    for cfg in (veronese_points(1, 3), veronese_points(2, 2), line_triple()):
        slc = build_slice(cfg, (0,) * cfg.ambient_dim, -1, 2)
        assert slc.vertex_count == 0
        assert slc.face_count(-1) == 1
        assert all(slc.face_count(t) == 0 for t in range(0, 3))


def test_bound_outside_semigroup_gives_void_complex():
    # coordinate sum 4 is not a multiple of 3: no residual can be a member,
    # so there are no faces at all, not even the empty one
    slc = build_slice(veronese_points(1, 3), (2, 2), -1, 2)
    assert slc.vertex_count == 0
    assert all(slc.face_count(t) == 0 for t in range(-1, 3))


def test_hollow_triangle_from_line_config():
    slc = build_slice(line_triple(), (5,), -1, 2)
    assert slc.vertex_count == 3
    assert slc.face_count(1) == 3
    assert slc.face_count(2) == 0
    bm = boundary_matrix(slc, 1)
    assert (bm.rows, bm.cols) == (3, 3)
    from collections import Counter

    per_col = Counter(c for _, c, _ in bm.entries)
    assert all(per_col[c] == 2 for c in range(3))
    assert all(v in (1, -1) for _, _, v in bm.entries)


def test_two_simplex_boundary_signs():
    slc = build_slice(line_triple(), (6,), -1, 2)
    assert slc.face_count(2) == 1
    bm = boundary_matrix(slc, 2)
    assert (bm.rows, bm.cols) == (3, 1)
    by_row = {r: v for r, _, v in bm.entries}
    assert by_row == {2: 1, 1: -1, 0: 1}


def test_augmentation_row_all_ones():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (3, 3), -1, 1)
    bm = boundary_matrix(slc, 0)
    assert (bm.rows, bm.cols) == (1, 4)
    assert bm.entries == [(0, c, 1) for c in range(4)]


def test_line_cubic_boundary_one():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (3, 3), -1, 1)
    bm = boundary_matrix(slc, 1)
    assert (bm.rows, bm.cols) == (4, 2)
    assert bm.entries == [(3, 0, 1), (0, 0, -1), (2, 1, 1), (1, 1, -1)]


def test_boundary_out_of_band_rejected():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (3, 3), 0, 1)
    with pytest.raises(ValueError):
        boundary_matrix(slc, 0)
    with pytest.raises(ValueError):
        boundary_matrix(slc, 2)


def test_boundary_composition_vanishes():
    for n, d, deg in [(1, 3, 3), (2, 2, 3), (2, 3, 2)]:
        cfg = veronese_points(n, d)
        for m in enumerate_multidegrees(cfg, deg, up_to_symmetry=True):
            slc = build_slice(cfg, m.canonical.coords, -1, 3)
            for j in range(0, 3):
                a = boundary_matrix(slc, j).to_scipy()
                b = boundary_matrix(slc, j + 1).to_scipy()
                assert (a @ b).nnz == 0, (n, d, m.canonical.coords, j)


def test_veronese_rule_matches_residual_rule():
    # coordinatewise bound comparison must agree with true semigroup residuals
    for n, d in [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)]:
        cfg = veronese_points(n, d)
        gen = general_config(cfg.points)
        top = len(cfg.points) - 1
        for deg in range(0, 5):
            for m in enumerate_multidegrees(cfg, deg, up_to_symmetry=True):
                b = m.canonical.coords
                s1 = build_slice(cfg, b, -1, top)
                s2 = build_slice(gen, b, -1, top)
                for t in range(-1, top + 1):
                    assert np.array_equal(
                        s1.vertices[s1.faces_by_dim[t]] if t >= 0 else s1.faces_by_dim[t],
                        s2.vertices[s2.faces_by_dim[t]] if t >= 0 else s2.faces_by_dim[t],
                    ), (n, d, b, t)


def test_monotone_in_bound():
    # growing the bound by a semigroup element can only add faces
    cfg = veronese_points(2, 2)
    small = build_slice(cfg, (2, 2, 2), -1, 2)
    large = build_slice(cfg, (4, 4, 2), -1, 2)
    for t in range(0, 3):
        faces_small = faces_as_point_sets(small, t)
        faces_large = faces_as_point_sets(large, t)
        assert faces_small <= faces_large


def test_face_counts_permutation_invariant():
    cfg = veronese_points(2, 3)
    for b in [(1, 4, 7), (0, 3, 6), (2, 2, 5)]:
        base = build_slice(cfg, tuple(sorted(b, reverse=True)), -1, 3)
        perm = build_slice(cfg, b, -1, 3)
        for t in range(-1, 4):
            assert base.face_count(t) == perm.face_count(t), (b, t)


def test_face_cap_guard():
    cfg = veronese_points(2, 2)
    with pytest.raises(CapacityError):
        build_slice(cfg, (6, 6, 6), -1, 4, max_faces=10)


def test_cone_apex_found_on_coned_complex():
    cfg = veronese_points(1, 2)
    slc = build_slice(cfg, (4, 2), -1, 2, find_cone_apex=True)
    assert slc.cone_apex == 0


def test_cone_apex_absent_when_no_vertex_cones():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (4, 2), -1, 1, find_cone_apex=True)
    assert slc.cone_apex is None
    default = build_slice(cfg, (4, 2), -1, 1)
    assert default.cone_apex is None


def test_cone_apex_on_full_simplex():
    slc = build_slice(line_triple(), (6,), -1, 2, find_cone_apex=True)
    assert slc.cone_apex == 0


def test_face_dataclass_validation():
    assert Face((0, 2, 5)).dimension == 2
    assert Face(()).dimension == -1
    with pytest.raises(ValueError):
        Face((2, 2))
    with pytest.raises(ValueError):
        Face((3, 1))


def test_slice_text_export():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (3, 3), -1, 1)
    lines = slice_to_text(slc).splitlines()
    assert lines[0] == "-1:"
    assert "0: 0" in lines
    assert "1: 0 3" in lines
    assert "1: 1 2" in lines


def test_slice_json_export():
    cfg = veronese_points(1, 3)
    slc = build_slice(cfg, (4, 2), 0, 1)
    assert slice_to_json(slc) == {
        "bound": [4, 2],
        "dims": [0, 1],
        "face_counts": {"0": 3, "1": 1},
    }


def test_matrix_text_and_container():
    bm = make_matrix(2, 2, [(0, 0, 1), (1, 1, -1)])
    assert bm.to_text() == "0 0 1\n1 1 -1"
    assert bm.nnz == 2
    assert isinstance(bm, BoundaryMatrix)


def test_general_config_uses_residual_rule():
    gen = general_config([(2,), (3,)])
    slc = build_slice(gen, (4,), -1, 1)
    # residual of (3,) against bound 4 is 1, not in the semigroup of {2, 3}
    assert faces_as_point_sets(slc, 0) == {frozenset({(2,)})}
    slc2 = build_slice(gen, (5,), -1, 1)
    assert faces_as_point_sets(slc2, 0) == {frozenset({(2,)}), frozenset({(3,)})}
    assert slc2.face_count(1) == 1
