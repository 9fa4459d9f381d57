#include "czdg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace czdg {

void warn(const std::string& message) {
    std::cerr << "czdg: warning: " << message << "\n";
}

namespace {

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                  (c.x() - a.x()) * (b.y() - a.y()));
}

std::pair<int, int> edge_key(int a, int b) {
    return {std::min(a, b), std::max(a, b)};
}

}  // namespace

double Mesh::tri_area(int t) const {
    const Triangle& tri = triangles[t];
    return signed_area(node_pos(tri.nodes[0]), node_pos(tri.nodes[1]),
                       node_pos(tri.nodes[2]));
}

Vec2 Mesh::tri_centroid(int t) const {
    const Triangle& tri = triangles[t];
    return (node_pos(tri.nodes[0]) + node_pos(tri.nodes[1]) +
            node_pos(tri.nodes[2])) /
           3.0;
}

Vec2 Mesh::face_midpoint(int f) const {
    const Face& face = faces[f];
    return 0.5 * (node_pos(face.nodes[0]) + node_pos(face.nodes[1]));
}

double Mesh::total_area() const {
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
        sum += tri_area(t);
    return sum;
}

std::set<int> Mesh::region_tags() const {
    std::set<int> tags;
    for (const Triangle& t : triangles) tags.insert(t.region_tag);
    return tags;
}

std::set<int> Mesh::boundary_tags() const {
    std::set<int> tags;
    for (const BoundaryEdge& e : boundary_edges) tags.insert(e.tag);
    return tags;
}

int Mesh::count_faces(FaceKind kind) const {
    int n = 0;
    for (const Face& f : faces)
        if (f.kind == kind) ++n;
    return n;
}

std::set<int> Mesh::boundary_nodes(FaceKind kind) const {
    std::set<int> out;
    for (const Face& f : faces) {
        if (f.interior() || f.kind != kind) continue;
        out.insert(f.nodes[0]);
        out.insert(f.nodes[1]);
    }
    return out;
}

double compute_h_f(const Face& face, const Mesh& mesh) {
    if (face.length <= 0.0)
        throw MeshError("degenerate face: zero length between nodes " +
                        std::to_string(face.nodes[0]) + " and " +
                        std::to_string(face.nodes[1]));
    double area = mesh.tri_area(face.plus_elem);
    if (face.interior())
        return (area + mesh.tri_area(face.minus_elem)) / (2.0 * face.length);
    return area / face.length;
}

Mesh build_faces(const MeshData& data, const BoundaryKindMap& kinds) {
    Mesh mesh;
    mesh.nodes = data.nodes;
    mesh.triangles = data.triangles;
    mesh.boundary_edges = data.boundary_edges;

    const int n_nodes = static_cast<int>(mesh.nodes.size());
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        for (int n : mesh.triangles[t].nodes)
            if (n < 0 || n >= n_nodes)
                throw MeshError("triangle " + std::to_string(t) +
                                " references node " + std::to_string(n));
        if (mesh.tri_area(t) <= 0.0)
            throw MeshError("triangle " + std::to_string(t) +
                            " is degenerate or not counter-clockwise");
    }

    // Tag lookup for boundary edges; duplicate entries must agree.
    std::map<std::pair<int, int>, int> edge_tags;
    for (const BoundaryEdge& e : data.boundary_edges) {
        for (int n : e.nodes)
            if (n < 0 || n >= n_nodes)
                throw MeshError("boundary edge references node " +
                                std::to_string(n));
        auto key = edge_key(e.nodes[0], e.nodes[1]);
        auto [it, inserted] = edge_tags.emplace(key, e.tag);
        if (!inserted && it->second != e.tag)
            throw MeshError("boundary edge (" + std::to_string(key.first) +
                            "," + std::to_string(key.second) +
                            ") tagged twice with different tags");
    }

    struct Incidence {
        int elem;
        int a, b;  // edge endpoints in the element's traversal order
    };
    std::map<std::pair<int, int>, std::vector<Incidence>> edges;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& nd = mesh.triangles[t].nodes;
        for (int k = 0; k < 3; ++k) {
            int a = nd[k];
            int b = nd[(k + 1) % 3];
            edges[edge_key(a, b)].push_back({t, a, b});
        }
    }

    for (const auto& [key, inc] : edges) {
        if (inc.size() > 2)
            throw MeshError("non-manifold edge (" +
                            std::to_string(key.first) + "," +
                            std::to_string(key.second) + ") shared by " +
                            std::to_string(inc.size()) + " triangles");

        Face face;
        if (inc.size() == 2) {
            // Smaller element id is the plus side.
            const Incidence& plus = inc[0].elem < inc[1].elem ? inc[0] : inc[1];
            const Incidence& minus = inc[0].elem < inc[1].elem ? inc[1] : inc[0];
            face.plus_elem = plus.elem;
            face.minus_elem = minus.elem;
            face.nodes = {plus.a, plus.b};
            face.kind = FaceKind::Interior;
            if (edge_tags.count(key))
                throw MeshError("interior edge (" + std::to_string(key.first) +
                                "," + std::to_string(key.second) +
                                ") listed as boundary edge");
        } else {
            const Incidence& only = inc[0];
            face.plus_elem = only.elem;
            face.nodes = {only.a, only.b};
            auto it = edge_tags.find(key);
            if (it == edge_tags.end())
                throw MeshError("untagged boundary edge (" +
                                std::to_string(key.first) + "," +
                                std::to_string(key.second) + ")");
            face.boundary_tag = it->second;
            auto kind_it = kinds.find(face.boundary_tag);
            if (kind_it == kinds.end())
                throw MeshError("no Dirichlet/Neumann classification for "
                                "boundary tag " +
                                std::to_string(face.boundary_tag));
            face.kind = kind_it->second;
            if (face.kind == FaceKind::Interior)
                throw MeshError("boundary tag " +
                                std::to_string(face.boundary_tag) +
                                " classified as interior");
        }

        Vec2 a = mesh.node_pos(face.nodes[0]);
        Vec2 b = mesh.node_pos(face.nodes[1]);
        Vec2 d = b - a;
        face.length = d.norm();
        if (face.length <= 0.0)
            throw MeshError("degenerate face between nodes " +
                            std::to_string(face.nodes[0]) + " and " +
                            std::to_string(face.nodes[1]));
        // Outward normal of the plus element for a CCW-traversed edge.
        face.normal = Vec2(d.y(), -d.x()) / face.length;
        face.tangent = Vec2(-face.normal.y(), face.normal.x());
        mesh.faces.push_back(face);
    }

    // Every tagged edge must actually sit on the boundary.
    std::size_t n_boundary_faces = 0;
    for (const Face& f : mesh.faces)
        if (!f.interior()) ++n_boundary_faces;
    if (n_boundary_faces != edge_tags.size())
        throw MeshError("boundary edge list does not match the mesh boundary");

    for (Face& f : mesh.faces) {
        f.h_f = compute_h_f(f, mesh);
        if (f.interior()) {
            Vec2 cpm = mesh.tri_centroid(f.minus_elem) -
                       mesh.tri_centroid(f.plus_elem);
            if (f.normal.dot(cpm) <= 0.0)
                throw MeshError("face normal does not point from plus to minus "
                                "element");
        }
    }
    return mesh;
}

namespace {

int to_int(const std::string& tok, int line, const char* what) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MeshError("line " + std::to_string(line) + ": expected " +
                        std::string(what) + ", got '" + tok + "'");
    }
}

double to_double(const std::string& tok, int line, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw MeshError("line " + std::to_string(line) + ": expected " +
                        std::string(what) + ", got '" + tok + "'");
    }
}

struct TokenStream {
    std::vector<std::pair<std::string, int>> tokens;  // token, line number
    std::size_t pos = 0;

    explicit TokenStream(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens.emplace_back(tok, lineno);
        }
    }

    bool done() const { return pos >= tokens.size(); }
    std::pair<std::string, int> next(const char* what) {
        if (done())
            throw MeshError(std::string("unexpected end of mesh file, expected ") +
                            what);
        return tokens[pos++];
    }
};

}  // namespace

MeshData parse_mesh(const std::string& text) {
    TokenStream ts(text);
    MeshData data;

    auto expect_section = [&](const char* name) {
        auto [tok, line] = ts.next(name);
        if (tok != name)
            throw MeshError("line " + std::to_string(line) + ": expected '" +
                            name + "', got '" + tok + "'");
    };

    expect_section("$Nodes");
    auto [ntok, nline] = ts.next("node count");
    int n_nodes = to_int(ntok, nline, "node count");
    if (n_nodes < 0) throw MeshError("negative node count");
    data.nodes.resize(n_nodes);
    std::vector<bool> seen(n_nodes, false);
    for (int i = 0; i < n_nodes; ++i) {
        auto [idt, idl] = ts.next("node id");
        int id = to_int(idt, idl, "node id");
        if (id < 0 || id >= n_nodes || seen[id])
            throw MeshError("line " + std::to_string(idl) +
                            ": node ids must be dense 0..N-1, got " + idt);
        seen[id] = true;
        auto [xt, xl] = ts.next("x coordinate");
        auto [yt, yl] = ts.next("y coordinate");
        data.nodes[id] = {to_double(xt, xl, "x coordinate"),
                          to_double(yt, yl, "y coordinate")};
    }

    expect_section("$Triangles");
    auto [ttok, tline] = ts.next("triangle count");
    int n_tris = to_int(ttok, tline, "triangle count");
    if (n_tris < 0) throw MeshError("negative triangle count");
    data.triangles.resize(n_tris);
    std::vector<bool> tseen(n_tris, false);
    for (int i = 0; i < n_tris; ++i) {
        auto [idt, idl] = ts.next("triangle id");
        int id = to_int(idt, idl, "triangle id");
        if (id < 0 || id >= n_tris || tseen[id])
            throw MeshError("line " + std::to_string(idl) +
                            ": triangle ids must be dense 0..N-1, got " + idt);
        tseen[id] = true;
        Triangle tri;
        auto [tagt, tagl] = ts.next("region tag");
        tri.region_tag = to_int(tagt, tagl, "region tag");
        for (int k = 0; k < 3; ++k) {
            auto [nt, nl] = ts.next("triangle node");
            tri.nodes[k] = to_int(nt, nl, "triangle node");
            if (tri.nodes[k] < 0 || tri.nodes[k] >= n_nodes)
                throw MeshError("line " + std::to_string(nl) +
                                ": triangle node out of range");
        }
        double area = signed_area(data.nodes[tri.nodes[0]].pos(),
                                  data.nodes[tri.nodes[1]].pos(),
                                  data.nodes[tri.nodes[2]].pos());
        if (area == 0.0)
            throw MeshError("triangle " + std::to_string(id) +
                            " has zero area");
        if (area < 0.0) {
            std::swap(tri.nodes[1], tri.nodes[2]);
            warn("triangle " + std::to_string(id) +
                 " was clockwise, node order fixed");
        }
        data.triangles[id] = tri;
    }

    expect_section("$BoundaryEdges");
    auto [btok, bline] = ts.next("boundary edge count");
    int n_edges = to_int(btok, bline, "boundary edge count");
    if (n_edges < 0) throw MeshError("negative boundary edge count");
    data.boundary_edges.resize(n_edges);
    std::vector<bool> bseen(n_edges, false);
    for (int i = 0; i < n_edges; ++i) {
        auto [idt, idl] = ts.next("edge id");
        int id = to_int(idt, idl, "edge id");
        if (id < 0 || id >= n_edges || bseen[id])
            throw MeshError("line " + std::to_string(idl) +
                            ": boundary edge ids must be dense 0..N-1");
        bseen[id] = true;
        BoundaryEdge e;
        auto [tagt, tagl] = ts.next("boundary tag");
        e.tag = to_int(tagt, tagl, "boundary tag");
        for (int k = 0; k < 2; ++k) {
            auto [nt, nl] = ts.next("edge node");
            e.nodes[k] = to_int(nt, nl, "edge node");
            if (e.nodes[k] < 0 || e.nodes[k] >= n_nodes)
                throw MeshError("line " + std::to_string(nl) +
                                ": edge node out of range");
        }
        data.boundary_edges[id] = e;
    }

    if (!ts.done()) {
        auto [tok, line] = ts.next("");
        throw MeshError("line " + std::to_string(line) +
                        ": trailing content '" + tok + "'");
    }
    return data;
}

std::string write_mesh(const Mesh& mesh) {
    std::string out;
    char buf[128];
    out += "$Nodes\n" + std::to_string(mesh.nodes.size()) + "\n";
    for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i, mesh.nodes[i].x,
                      mesh.nodes[i].y);
        out += buf;
    }
    out += "$Triangles\n" + std::to_string(mesh.triangles.size()) + "\n";
    for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
        const Triangle& t = mesh.triangles[i];
        std::snprintf(buf, sizeof buf, "%zu %d %d %d %d\n", i, t.region_tag,
                      t.nodes[0], t.nodes[1], t.nodes[2]);
        out += buf;
    }
    out += "$BoundaryEdges\n" + std::to_string(mesh.boundary_edges.size()) +
           "\n";
    for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
        const BoundaryEdge& e = mesh.boundary_edges[i];
        std::snprintf(buf, sizeof buf, "%zu %d %d %d\n", i, e.tag, e.nodes[0],
                      e.nodes[1]);
        out += buf;
    }
    return out;
}

Mesh read_mesh(const std::string& text) {
    MeshData data = parse_mesh(text);
    BoundaryKindMap kinds;
    for (const BoundaryEdge& e : data.boundary_edges)
        kinds[e.tag] = FaceKind::Neumann;
    return build_faces(data, kinds);
}

Mesh read_mesh(const std::string& text, const BoundaryKindMap& kinds) {
    return build_faces(parse_mesh(text), kinds);
}

RegionRule circle_region(double cx, double cy, double radius, int tag) {
    return {[cx, cy, radius](const Vec2& p) {
                return (p - Vec2(cx, cy)).squaredNorm() <= radius * radius;
            },
            tag};
}

MeshData generate_rect_data(double width, double height, int nx, int ny,
                            const std::vector<RegionRule>& regions,
                            bool crossed) {
    if (width <= 0.0 || height <= 0.0)
        throw MeshError("rectangle dimensions must be positive");
    if (nx < 1 || ny < 1) throw MeshError("nx and ny must be at least 1");

    MeshData data;
    const double dx = width / nx;
    const double dy = height / ny;

    auto grid = [nx](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            data.nodes.push_back({i * dx, j * dy});

    const int center0 = static_cast<int>(data.nodes.size());
    auto center = [&](int i, int j) { return center0 + j * nx + i; };
    if (crossed)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                data.nodes.push_back({(i + 0.5) * dx, (j + 0.5) * dy});

    auto region_of = [&regions](const Vec2& c) {
        for (const RegionRule& r : regions)
            if (r.contains(c)) return r.tag;
        return 0;
    };
    auto push_tri = [&](int a, int b, int c) {
        Triangle t;
        t.nodes = {a, b, c};
        Vec2 centroid = (data.nodes[a].pos() + data.nodes[b].pos() +
                         data.nodes[c].pos()) /
                        3.0;
        t.region_tag = region_of(centroid);
        data.triangles.push_back(t);
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            int bl = grid(i, j), br = grid(i + 1, j);
            int tl = grid(i, j + 1), tr = grid(i + 1, j + 1);
            if (crossed) {
                int c = center(i, j);
                push_tri(bl, br, c);
                push_tri(br, tr, c);
                push_tri(tr, tl, c);
                push_tri(tl, bl, c);
            } else {
                push_tri(bl, br, tr);
                push_tri(bl, tr, tl);
            }
        }
    }

    for (int i = 0; i < nx; ++i)
        data.boundary_edges.push_back({{grid(i, 0), grid(i + 1, 0)},
                                       rect_tags::bottom});
    for (int i = 0; i < nx; ++i)
        data.boundary_edges.push_back({{grid(i, ny), grid(i + 1, ny)},
                                       rect_tags::top});
    for (int j = 0; j < ny; ++j)
        data.boundary_edges.push_back({{grid(0, j), grid(0, j + 1)},
                                       rect_tags::left});
    for (int j = 0; j < ny; ++j)
        data.boundary_edges.push_back({{grid(nx, j), grid(nx, j + 1)},
                                       rect_tags::right});
    return data;
}

Mesh generate_rect(double width, double height, int nx, int ny,
                   const std::vector<RegionRule>& regions, bool crossed,
                   const BoundaryKindMap& kinds) {
    BoundaryKindMap k = kinds;
    for (int tag : {rect_tags::bottom, rect_tags::top, rect_tags::left,
                    rect_tags::right})
        k.emplace(tag, FaceKind::Neumann);
    return build_faces(generate_rect_data(width, height, nx, ny, regions,
                                          crossed),
                       k);
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 d = b - a;
    double len2 = d.squaredNorm();
    if (len2 == 0.0) return (p - a).norm();
    double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return (p - (a + t * d)).norm();
}

}  // namespace

std::vector<int> mark_initial_crack(const Mesh& mesh, const CrackSegment& seg,
                                    double tol) {
    const double rad = seg.angle_deg * M_PI / 180.0;
    const Vec2 half = 0.5 * seg.length * Vec2(std::cos(rad), std::sin(rad));
    const Vec2 a = seg.center - half;
    const Vec2 b = seg.center + half;

    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        const Face& face = mesh.faces[f];
        if (!face.interior()) continue;
        if (point_segment_distance(mesh.node_pos(face.nodes[0]), a, b) <= tol &&
            point_segment_distance(mesh.node_pos(face.nodes[1]), a, b) <= tol)
            out.push_back(f);
    }
    if (out.empty()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", tol);
        warn("initial crack segment matched no interior faces (tol = " +
             std::string(buf) + ")");
    }
    return out;
}

}  // namespace czdg
