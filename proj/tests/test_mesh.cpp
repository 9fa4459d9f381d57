#include <cmath>
#include <set>

#include "czdg/mesh.hpp"
#include "doctest.h"

using namespace czdg;

namespace {

bool axis_aligned(const Vec2& n) {
    return std::abs(std::abs(n.x()) - 1.0) < 1e-12 ||
           std::abs(std::abs(n.y()) - 1.0) < 1e-12;
}

}  // namespace

TEST_CASE("plain rectangle generator") {
    Mesh m = generate_rect(1.0, 1.0, 4, 4, {}, false);
    CHECK(m.nodes.size() == 25);
    CHECK(m.triangles.size() == 32);
    CHECK(m.boundary_edges.size() == 16);
    CHECK(m.count_faces(FaceKind::Interior) == 40);
    CHECK(m.count_faces(FaceKind::Neumann) == 16);
    CHECK(m.count_faces(FaceKind::Dirichlet) == 0);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
        CHECK(m.tri_area(static_cast<int>(t)) > 0.0);
}

TEST_CASE("crossed rectangle generator") {
    Mesh m = generate_rect(1.0, 1.0, 4, 4);
    CHECK(m.nodes.size() == 41);
    CHECK(m.triangles.size() == 64);
    CHECK(m.count_faces(FaceKind::Interior) == 88);
    CHECK(m.count_faces(FaceKind::Neumann) == 16);
    CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-14));

    Mesh wide = generate_rect(2.0, 1.0, 2, 1);
    CHECK(wide.nodes.size() == 8);
    CHECK(wide.triangles.size() == 8);
    CHECK(wide.count_faces(FaceKind::Interior) == 9);
    CHECK(wide.boundary_edges.size() == 6);
    CHECK(wide.total_area() == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("face frames and orientation") {
    Mesh m = generate_rect(1.0, 1.0, 3, 3);
    for (std::size_t i = 0; i < m.faces.size(); ++i) {
        const Face& f = m.faces[i];
        CHECK(f.normal.norm() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.tangent.x() == doctest::Approx(-f.normal.y()).epsilon(1e-14));
        CHECK(f.tangent.y() == doctest::Approx(f.normal.x()).epsilon(1e-14));
        CHECK(f.length > 0.0);
        CHECK(f.h_f > 0.0);
        if (f.interior()) {
            CHECK(f.plus_elem < f.minus_elem);
            CHECK(f.boundary_tag == -1);
            Vec2 d = m.tri_centroid(f.minus_elem) - m.tri_centroid(f.plus_elem);
            CHECK(f.normal.dot(d) > 0.0);
        } else {
            CHECK(f.minus_elem == -1);
            CHECK(f.boundary_tag >= rect_tags::bottom);
            CHECK(f.boundary_tag <= rect_tags::right);
            Vec2 d = m.face_midpoint(static_cast<int>(i)) -
                     m.tri_centroid(f.plus_elem);
            CHECK(f.normal.dot(d) > 0.0);
        }
    }
}

TEST_CASE("face size h_f") {
    // Plain 4x4 unit square: grid faces see two half-cells, diagonals the
    // same area over a longer edge.
    Mesh plain = generate_rect(1.0, 1.0, 4, 4, {}, false);
    for (std::size_t i = 0; i < plain.faces.size(); ++i) {
        const Face& f = plain.faces[i];
        if (!f.interior()) continue;
        double expect = axis_aligned(f.normal) ? 0.125 : 0.08838834764831843;
        CHECK(f.h_f == doctest::Approx(expect).epsilon(1e-13));
        CHECK(compute_h_f(f, plain) == doctest::Approx(f.h_f).epsilon(1e-14));
    }

    Mesh crossed = generate_rect(1.0, 1.0, 4, 4);
    for (const Face& f : crossed.faces) {
        double expect;
        if (!f.interior())
            expect = 0.0625;
        else
            expect = axis_aligned(f.normal) ? 0.0625 : 0.08838834764831843;
        CHECK(f.h_f == doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("region rules tag by centroid") {
    RegionRule inc = circle_region(0.5, 0.5, 0.3, 7);
    Mesh m = generate_rect(1.0, 1.0, 4, 4, {inc});
    std::set<int> tags = m.region_tags();
    CHECK(tags == std::set<int>{0, 7});
    int inside = 0;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        Vec2 c = m.tri_centroid(static_cast<int>(t));
        bool in = (c - Vec2(0.5, 0.5)).norm() <= 0.3;
        CHECK(m.triangles[t].region_tag == (in ? 7 : 0));
        if (in) ++inside;
    }
    CHECK(inside > 0);

    // First matching rule wins.
    RegionRule big = circle_region(0.5, 0.5, 10.0, 9);
    Mesh m2 = generate_rect(1.0, 1.0, 2, 2, {inc, big});
    CHECK(m2.region_tags() == std::set<int>{7, 9});
}

TEST_CASE("boundary kind classification") {
    BoundaryKindMap kinds{{rect_tags::bottom, FaceKind::Dirichlet},
                          {rect_tags::top, FaceKind::Dirichlet}};
    Mesh m = generate_rect(1.0, 1.0, 3, 2, {}, true, kinds);
    CHECK(m.count_faces(FaceKind::Dirichlet) == 6);
    CHECK(m.count_faces(FaceKind::Neumann) == 4);
    std::set<int> dn = m.boundary_nodes(FaceKind::Dirichlet);
    CHECK(dn.count(0) == 1);  // bottom-left corner
    CHECK(m.boundary_tags() == std::set<int>{1, 2, 3, 4});
}

TEST_CASE("mesh text round trip") {
    RegionRule inc = circle_region(0.6, 0.4, 0.25, 3);
    Mesh m = generate_rect(1.5, 1.0, 3, 2, {inc});
    std::string text = write_mesh(m);
    Mesh again = read_mesh(text);
    CHECK(write_mesh(again) == text);
    CHECK(again.nodes.size() == m.nodes.size());
    CHECK(again.faces.size() == m.faces.size());
    CHECK(again.total_area() == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("parser fixes clockwise triangles") {
    std::string text =
        "$Nodes\n3\n0 0 0\n1 1 0\n2 0 1\n"
        "$Triangles\n1\n0 0 0 2 1\n"
        "$BoundaryEdges\n3\n0 1 0 1\n1 1 1 2\n2 1 2 0\n";
    MeshData d = parse_mesh(text);
    CHECK(d.triangles[0].nodes == std::array<int, 3>{{0, 1, 2}});
}

TEST_CASE("parser rejects malformed input") {
    CHECK_THROWS_AS(parse_mesh("$Nodes\n1\n0 0 0\n"), MeshError);

    // zero-area triangle
    CHECK_THROWS_AS(
        parse_mesh("$Nodes\n3\n0 0 0\n1 1 0\n2 2 0\n"
                   "$Triangles\n1\n0 0 0 1 2\n$BoundaryEdges\n0\n"),
        MeshError);

    // node reference out of range
    CHECK_THROWS_AS(
        parse_mesh("$Nodes\n3\n0 0 0\n1 1 0\n2 0 1\n"
                   "$Triangles\n1\n0 0 0 1 5\n$BoundaryEdges\n0\n"),
        MeshError);

    // ids must be dense
    CHECK_THROWS_AS(
        parse_mesh("$Nodes\n2\n0 0 0\n5 1 0\n"
                   "$Triangles\n0\n$BoundaryEdges\n0\n"),
        MeshError);

    // trailing content
    CHECK_THROWS_AS(
        parse_mesh("$Nodes\n1\n0 0 0\n$Triangles\n0\n$BoundaryEdges\n0\n42\n"),
        MeshError);
}

TEST_CASE("face construction rejects inconsistent topology") {
    // three triangles sharing one edge
    std::string nonmanifold =
        "$Nodes\n5\n0 0 0\n1 1 0\n2 0 1\n3 0 -1\n4 0.5 1\n"
        "$Triangles\n3\n0 0 0 1 2\n1 0 0 3 1\n2 0 0 1 4\n"
        "$BoundaryEdges\n0\n";
    CHECK_THROWS_AS(read_mesh(nonmanifold), MeshError);

    // shared edge listed as boundary
    std::string shared_as_boundary =
        "$Nodes\n4\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n"
        "$Triangles\n2\n0 0 0 1 2\n1 0 0 2 3\n"
        "$BoundaryEdges\n5\n0 1 0 1\n1 4 1 2\n2 2 2 3\n3 3 3 0\n4 1 0 2\n";
    CHECK_THROWS_AS(read_mesh(shared_as_boundary), MeshError);

    // outer edge missing from the boundary list
    std::string missing_edge =
        "$Nodes\n4\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n"
        "$Triangles\n2\n0 0 0 1 2\n1 0 0 2 3\n"
        "$BoundaryEdges\n3\n0 1 0 1\n1 4 1 2\n2 2 2 3\n";
    CHECK_THROWS_AS(read_mesh(missing_edge), MeshError);

    // conflicting tags on a repeated edge
    std::string conflicting =
        "$Nodes\n4\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n"
        "$Triangles\n2\n0 0 0 1 2\n1 0 0 2 3\n"
        "$BoundaryEdges\n5\n0 1 0 1\n1 4 1 2\n2 2 2 3\n3 3 3 0\n4 2 0 1\n";
    CHECK_THROWS_AS(read_mesh(conflicting), MeshError);

    // tag with no classification
    std::string ok =
        "$Nodes\n4\n0 0 0\n1 1 0\n2 1 1\n3 0 1\n"
        "$Triangles\n2\n0 0 0 1 2\n1 0 0 2 3\n"
        "$BoundaryEdges\n4\n0 1 0 1\n1 4 1 2\n2 2 2 3\n3 3 3 0\n";
    CHECK_THROWS_AS(read_mesh(ok, BoundaryKindMap{{1, FaceKind::Neumann}}),
                    MeshError);
    CHECK_NOTHROW(read_mesh(ok));
}

TEST_CASE("initial crack marks faces on a segment") {
    Mesh m = generate_rect(1.0, 1.0, 2, 2);
    CrackSegment seg{Vec2(0.5, 0.25), 0.5, 90.0};
    std::vector<int> faces = mark_initial_crack(m, seg, 1e-8);
    REQUIRE(faces.size() == 1);
    const Face& f = m.faces[faces[0]];
    CHECK(f.interior());
    CHECK(m.face_midpoint(faces[0]).x() == doctest::Approx(0.5));
    CHECK(m.face_midpoint(faces[0]).y() == doctest::Approx(0.25));
    CHECK(f.length == doctest::Approx(0.5));

    // a segment that touches no face warns and returns nothing
    CrackSegment off{Vec2(0.31, 0.31), 0.1, 45.0};
    CHECK(mark_initial_crack(m, off, 1e-8).empty());
}
