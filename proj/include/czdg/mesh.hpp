#pragma once

#include <array>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "czdg/core.hpp"

namespace czdg {

struct Node {
    double x = 0.0;
    double y = 0.0;
    Vec2 pos() const { return Vec2(x, y); }
};

// Vertices are stored counter-clockwise.
struct Triangle {
    std::array<int, 3> nodes{{-1, -1, -1}};
    int region_tag = 0;
};

enum class FaceKind { Interior, Dirichlet, Neumann };

// A face is an element edge. Interior faces carry the cohesive coupling,
// Dirichlet faces carry Nitsche boundary terms, Neumann faces only loads.
//
// The normal points from the plus element into the minus element (outward
// for boundary faces). (normal, tangent) is a right-handed pair.
struct Face {
    std::array<int, 2> nodes{{-1, -1}};
    int plus_elem = -1;
    int minus_elem = -1;  // -1 on boundary faces
    FaceKind kind = FaceKind::Interior;
    Vec2 normal{0.0, 0.0};
    Vec2 tangent{0.0, 0.0};
    double length = 0.0;
    double h_f = 0.0;
    int boundary_tag = -1;  // -1 on interior faces

    bool interior() const { return minus_elem >= 0; }
};

struct BoundaryEdge {
    std::array<int, 2> nodes{{-1, -1}};
    int tag = 0;
};

// Raw mesh as stored on disk: geometry and tags, no derived face data.
struct MeshData {
    std::vector<Node> nodes;
    std::vector<Triangle> triangles;
    std::vector<BoundaryEdge> boundary_edges;
};

struct Mesh {
    std::vector<Node> nodes;
    std::vector<Triangle> triangles;
    std::vector<Face> faces;
    std::vector<BoundaryEdge> boundary_edges;

    Vec2 node_pos(int n) const { return nodes[n].pos(); }
    double tri_area(int t) const;
    Vec2 tri_centroid(int t) const;
    Vec2 face_midpoint(int f) const;
    double total_area() const;
    std::set<int> region_tags() const;
    std::set<int> boundary_tags() const;
    int count_faces(FaceKind kind) const;
    // Node ids that lie on a boundary face of the given kind.
    std::set<int> boundary_nodes(FaceKind kind) const;
};

using BoundaryKindMap = std::map<int, FaceKind>;

// Derives the face list from raw mesh data. Every boundary edge must carry a
// tag present in `kinds`; edges shared by more than two triangles are
// rejected as non-manifold. Face ids are ordered by (min node, max node).
Mesh build_faces(const MeshData& data, const BoundaryKindMap& kinds);

// h_F = (|T+| + |T-|) / (2 |F|) on interior faces, |T| / |F| on boundary.
double compute_h_f(const Face& face, const Mesh& mesh);

MeshData parse_mesh(const std::string& text);
std::string write_mesh(const Mesh& mesh);

// Convenience: parse + build; without a kind map all boundary tags are
// classified Neumann (run setups classify from their boundary conditions).
Mesh read_mesh(const std::string& text);
Mesh read_mesh(const std::string& text, const BoundaryKindMap& kinds);

// Boundary tags used by the structured rectangle generator.
namespace rect_tags {
constexpr int bottom = 1;
constexpr int top = 2;
constexpr int left = 3;
constexpr int right = 4;
}  // namespace rect_tags

struct RegionRule {
    std::function<bool(const Vec2&)> contains;
    int tag = 0;
};

RegionRule circle_region(double cx, double cy, double radius, int tag);

// Structured mesh of nx * ny cells. crossed = true adds the cell midpoint
// and splits each cell into four triangles; otherwise two per cell.
// Region tags are assigned by first matching rule on the centroid (0 if none).
MeshData generate_rect_data(double width, double height, int nx, int ny,
                            const std::vector<RegionRule>& regions = {},
                            bool crossed = true);
Mesh generate_rect(double width, double height, int nx, int ny,
                   const std::vector<RegionRule>& regions = {},
                   bool crossed = true,
                   const BoundaryKindMap& kinds = {});

struct CrackSegment {
    Vec2 center{0.0, 0.0};
    double length = 0.0;
    double angle_deg = 0.0;
};

// Interior faces whose both endpoints lie within tol of the segment,
// sorted by face id. Empty result emits a warning.
std::vector<int> mark_initial_crack(const Mesh& mesh, const CrackSegment& seg,
                                    double tol);

}  // namespace czdg
