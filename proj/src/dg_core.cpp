#include "czdg/dg_core.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace czdg {

int worker_threads() {
    static int n = [] {
        unsigned hw = std::thread::hardware_concurrency();
        int def = static_cast<int>(std::min(hw == 0 ? 1u : hw, 4u));
        if (const char* env = std::getenv("CZDG_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        return def;
    }();
    return n;
}

namespace {

// Deterministic parallel loop: every index writes only its own slot, so the
// result is independent of the thread count.
void parallel_for(int n, const std::function<void(int)>& body) {
    int threads = std::min(worker_threads(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<int> next{0};
    constexpr int chunk = 64;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                int begin = next.fetch_add(chunk);
                if (begin >= n) return;
                int end = std::min(begin + chunk, n);
                for (int i = begin; i < end; ++i) body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// Two-point Gauss rule on a segment, exact through cubics. The integrands
// here are at most quadratic (P1 jumps squared; fluxes are constant).
constexpr double kGaussOffset = 0.28867513459481287;  // 1/(2 sqrt(3))

Eigen::Matrix<double, 2, 3> traction_map(const Vec2& n) {
    Eigen::Matrix<double, 2, 3> N;
    N << n.x(), 0.0, n.y(),
         0.0, n.y(), n.x();
    return N;
}

}  // namespace

Assembler::Assembler(const Mesh& mesh, const MaterialField& materials,
                     double gamma0)
    : mesh_(mesh), materials_(materials), gamma0_(gamma0) {
    if (gamma0 <= 0.0) throw Error("gamma0 must be positive");
    materials.validate_covers(mesh);
    dof_map_.n_elements = static_cast<int>(mesh.triangles.size());
    build_element_ops();
    build_face_ops();
}

void Assembler::build_element_ops() {
    const int n = dof_map_.n_elements;
    element_ops_.resize(n);
    volume_triplets_.clear();
    volume_triplets_.reserve(static_cast<std::size_t>(n) * 36);

    for (int e = 0; e < n; ++e) {
        const Triangle& tri = mesh_.triangles[e];
        const Vec2 p0 = mesh_.node_pos(tri.nodes[0]);
        const Vec2 p1 = mesh_.node_pos(tri.nodes[1]);
        const Vec2 p2 = mesh_.node_pos(tri.nodes[2]);
        const double area = mesh_.tri_area(e);

        // P1 shape gradients: dN_i/dx = b_i, dN_i/dy = c_i.
        const double inv2A = 1.0 / (2.0 * area);
        const double b[3] = {(p1.y() - p2.y()) * inv2A,
                             (p2.y() - p0.y()) * inv2A,
                             (p0.y() - p1.y()) * inv2A};
        const double c[3] = {(p2.x() - p1.x()) * inv2A,
                             (p0.x() - p2.x()) * inv2A,
                             (p1.x() - p0.x()) * inv2A};

        ElementOps& ops = element_ops_[e];
        ops.area = area;
        ops.B.setZero();
        for (int i = 0; i < 3; ++i) {
            ops.B(0, 2 * i) = b[i];
            ops.B(1, 2 * i + 1) = c[i];
            ops.B(2, 2 * i) = c[i];
            ops.B(2, 2 * i + 1) = b[i];
        }

        const IsotropicElastic& mat = materials_.at(tri.region_tag);
        Eigen::Matrix3d D;
        D << mat.lambda + 2.0 * mat.mu, mat.lambda, 0.0,
             mat.lambda, mat.lambda + 2.0 * mat.mu, 0.0,
             0.0, 0.0, mat.mu;
        ops.DB = D * ops.B;

        Eigen::Matrix<double, 6, 6> Ke = area * ops.B.transpose() * ops.DB;
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                volume_triplets_.emplace_back(6 * e + i, 6 * e + j, Ke(i, j));
    }
}

Eigen::Vector3d Assembler::barycentric(int elem, const Vec2& p) const {
    const Triangle& tri = mesh_.triangles[elem];
    const Vec2 p0 = mesh_.node_pos(tri.nodes[0]);
    const Vec2 p1 = mesh_.node_pos(tri.nodes[1]);
    const Vec2 p2 = mesh_.node_pos(tri.nodes[2]);
    const double area = element_ops_[elem].area;
    auto tri_a = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                      (c.x() - a.x()) * (b.y() - a.y()));
    };
    return Eigen::Vector3d(tri_a(p, p1, p2), tri_a(p0, p, p2),
                           tri_a(p0, p1, p)) /
           area;
}

void Assembler::build_face_ops() {
    const int n = static_cast<int>(mesh_.faces.size());
    face_ops_.resize(n);
    face_gamma_.resize(n);

    for (int f = 0; f < n; ++f) {
        const Face& face = mesh_.faces[f];
        FaceOps& ops = face_ops_[f];

        const Vec2 a = mesh_.node_pos(face.nodes[0]);
        const Vec2 b = mesh_.node_pos(face.nodes[1]);
        const Vec2 mid = 0.5 * (a + b);
        const Vec2 half = 0.5 * (b - a);
        ops.qpt[0] = mid - 2.0 * kGaussOffset * half;
        ops.qpt[1] = mid + 2.0 * kGaussOffset * half;
        ops.weight = 0.5 * face.length;

        ops.n_dofs = face.interior() ? 12 : 6;
        ops.dof_ids.fill(-1);
        for (int v = 0; v < 3; ++v)
            for (int comp = 0; comp < 2; ++comp)
                ops.dof_ids[2 * v + comp] = dof_map_(face.plus_elem, v, comp);
        if (face.interior())
            for (int v = 0; v < 3; ++v)
                for (int comp = 0; comp < 2; ++comp)
                    ops.dof_ids[6 + 2 * v + comp] =
                        dof_map_(face.minus_elem, v, comp);

        for (int q = 0; q < 2; ++q) {
            ops.jump[q].setZero();
            Eigen::Vector3d Np = barycentric(face.plus_elem, ops.qpt[q]);
            for (int v = 0; v < 3; ++v)
                for (int comp = 0; comp < 2; ++comp)
                    ops.jump[q](comp, 2 * v + comp) = Np(v);
            if (face.interior()) {
                Eigen::Vector3d Nm = barycentric(face.minus_elem, ops.qpt[q]);
                for (int v = 0; v < 3; ++v)
                    for (int comp = 0; comp < 2; ++comp)
                        ops.jump[q](comp, 6 + 2 * v + comp) = -Nm(v);
            }
        }

        ops.flux.setZero();
        Eigen::Matrix<double, 2, 3> N = traction_map(face.normal);
        const double w_plus = face.interior() ? 0.5 : 1.0;
        ops.flux.block<2, 6>(0, 0) =
            w_plus * N * element_ops_[face.plus_elem].DB;
        if (face.interior())
            ops.flux.block<2, 6>(0, 6) =
                0.5 * N * element_ops_[face.minus_elem].DB;

        const IsotropicElastic& mp =
            materials_.at(mesh_.triangles[face.plus_elem].region_tag);
        double g = penalty_gamma(mp, gamma0_);
        if (face.interior()) {
            const IsotropicElastic& mm =
                materials_.at(mesh_.triangles[face.minus_elem].region_tag);
            g = std::max(g, penalty_gamma(mm, gamma0_));
        }
        face_gamma_[f] = g;
    }
}

std::vector<FaceCoupling> Assembler::rigid_couplings() const {
    return std::vector<FaceCoupling>(mesh_.faces.size());
}

void Assembler::coupling_matrices(int face, const FaceCoupling& c, Mat2& P,
                                  Mat2& K, Mat2& S, bool& skip) const {
    skip = false;
    const Face& f = mesh_.faces[face];
    const double h_over_gamma = f.h_f / face_gamma_[face];

    Mat2 R;  // columns: face normal, face tangent
    R.col(0) = f.normal;
    R.col(1) = f.tangent;

    switch (c.mode) {
        case FaceCoupling::Mode::FreeOpen:
            skip = true;
            P.setZero();
            K.setZero();
            S.setZero();
            return;
        case FaceCoupling::Mode::Rigid:
            P.setIdentity();
            K.setZero();
            S = Mat2::Identity() / h_over_gamma;
            return;
        case FaceCoupling::Mode::Contact: {
            // Rigid tie in the normal direction only.
            Mat2 Pf = Mat2::Zero();
            Pf(0, 0) = 1.0;
            P = R * Pf * R.transpose();
            K.setZero();
            Mat2 Sf = Mat2::Zero();
            Sf(0, 0) = 1.0 / h_over_gamma;
            S = R * Sf * R.transpose();
            return;
        }
        case FaceCoupling::Mode::Cohesive: {
            P.setIdentity();
            // The solver needs a symmetric matrix; only the cross-terms
            // secant variant is affected by this symmetrization.
            Mat2 Kf = 0.5 * (c.K + c.K.transpose());
            Mat2 Sf = interface_stiffness_S_h(Kf, f.h_f, face_gamma_[face]);
            K = R * Kf * R.transpose();
            S = R * Sf * R.transpose();
            return;
        }
    }
}

std::vector<Eigen::Triplet<double>> Assembler::face_triplets(
    const std::vector<FaceCoupling>& couplings) const {
    const int n = static_cast<int>(mesh_.faces.size());
    if (static_cast<int>(couplings.size()) != n)
        throw Error("coupling list size does not match face count");

    struct Block {
        Eigen::Matrix<double, 12, 12> A;
        bool active = false;
    };
    std::vector<Block> blocks(n);

    parallel_for(n, [&](int f) {
        const Face& face = mesh_.faces[f];
        if (face.kind == FaceKind::Neumann) return;

        Mat2 P, K, S;
        bool skip;
        coupling_matrices(f, couplings[f], P, K, S, skip);

        const FaceOps& ops = face_ops_[f];
        Block& blk = blocks[f];
        blk.active = true;
        blk.A.setZero();
        if (skip) return;  // structural zeros keep the sparsity pattern fixed

        const auto& F = ops.flux;
        const Eigen::Matrix<double, 2, 12> KF = K * F;
        const Eigen::Matrix<double, 12, 12> FKF =
            (2.0 * ops.weight) * F.transpose() * KF;
        blk.A -= FKF;
        for (int q = 0; q < 2; ++q) {
            const Eigen::Matrix<double, 2, 12> PJ = P * ops.jump[q];
            const Eigen::Matrix<double, 2, 12> G = PJ + KF;
            blk.A += ops.weight * (G.transpose() * (S * G).eval() -
                                   F.transpose() * PJ -
                                   PJ.transpose() * F);
        }
    });

    std::vector<Eigen::Triplet<double>> triplets;
    std::size_t count = 0;
    for (const Block& b : blocks)
        if (b.active) ++count;
    triplets.reserve(count * 144);
    for (int f = 0; f < n; ++f) {
        if (!blocks[f].active) continue;
        const FaceOps& ops = face_ops_[f];
        for (int i = 0; i < ops.n_dofs; ++i)
            for (int j = 0; j < ops.n_dofs; ++j)
                triplets.emplace_back(ops.dof_ids[i], ops.dof_ids[j],
                                      blocks[f].A(i, j));
    }
    return triplets;
}

namespace {

// Degree-4 rule on the reference triangle (6 points), enough for the smooth
// body forces used in verification runs.
struct TriQuadrature {
    static constexpr int n = 6;
    double w[n];
    double l1[n], l2[n];
    TriQuadrature() {
        const double wa = 0.223381589678011;
        const double wb = 0.109951743655322;
        const double a = 0.445948490915965;
        const double b = 0.091576213509771;
        const double ws[n] = {wa, wa, wa, wb, wb, wb};
        const double x1[n] = {a, 1 - 2 * a, a, b, 1 - 2 * b, b};
        const double x2[n] = {a, a, 1 - 2 * a, b, b, 1 - 2 * b};
        for (int i = 0; i < n; ++i) {
            w[i] = ws[i];
            l1[i] = x1[i];
            l2[i] = x2[i];
        }
    }
};

}  // namespace

Eigen::VectorXd Assembler::assemble_rhs(
    const std::vector<FaceCoupling>& couplings, const BoundaryData& bd) const {
    if (couplings.size() != mesh_.faces.size())
        throw Error("coupling list size does not match face count");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dof_map_.size());

    if (bd.body_force) {
        static const TriQuadrature quad;
        for (int e = 0; e < dof_map_.n_elements; ++e) {
            const Triangle& tri = mesh_.triangles[e];
            const Vec2 p0 = mesh_.node_pos(tri.nodes[0]);
            const Vec2 p1 = mesh_.node_pos(tri.nodes[1]);
            const Vec2 p2 = mesh_.node_pos(tri.nodes[2]);
            for (int q = 0; q < TriQuadrature::n; ++q) {
                double l1 = quad.l1[q], l2 = quad.l2[q], l0 = 1.0 - l1 - l2;
                Vec2 x = l0 * p0 + l1 * p1 + l2 * p2;
                Vec2 fq = bd.body_force(x, tri.region_tag);
                double w = quad.w[q] * element_ops_[e].area;
                const double N[3] = {l0, l1, l2};
                for (int v = 0; v < 3; ++v)
                    for (int comp = 0; comp < 2; ++comp)
                        rhs[dof_map_(e, v, comp)] += w * N[v] * fq[comp];
            }
        }
    }

    for (int f = 0; f < static_cast<int>(mesh_.faces.size()); ++f) {
        const Face& face = mesh_.faces[f];
        if (face.interior()) continue;
        const FaceOps& ops = face_ops_[f];

        if (face.kind == FaceKind::Neumann) {
            auto it = bd.neumann.find(face.boundary_tag);
            if (it == bd.neumann.end())
                throw Error("no traction data for Neumann tag " +
                            std::to_string(face.boundary_tag));
            for (int q = 0; q < 2; ++q) {
                Vec2 h = it->second(ops.qpt[q]);
                Eigen::Matrix<double, 12, 1> r =
                    ops.weight * ops.jump[q].transpose() * h;
                for (int i = 0; i < ops.n_dofs; ++i)
                    rhs[ops.dof_ids[i]] += r(i);
            }
            continue;
        }

        auto it = bd.dirichlet.find(face.boundary_tag);
        if (it == bd.dirichlet.end())
            throw Error("no Dirichlet data for tag " +
                        std::to_string(face.boundary_tag));
        Mat2 P, K, S;
        bool skip;
        coupling_matrices(f, couplings[f], P, K, S, skip);
        if (skip) continue;

        const auto& F = ops.flux;
        const Eigen::Matrix<double, 2, 12> KF = K * F;
        for (int q = 0; q < 2; ++q) {
            Vec2 g = it->second(ops.qpt[q]);
            const Eigen::Matrix<double, 2, 12> G = P * ops.jump[q] + KF;
            Eigen::Matrix<double, 12, 1> r =
                ops.weight *
                (G.transpose() * (S * g).eval() - F.transpose() * (P * g).eval());
            for (int i = 0; i < ops.n_dofs; ++i)
                rhs[ops.dof_ids[i]] += r(i);
        }
    }
    return rhs;
}

AssembledSystem Assembler::assemble(const std::vector<FaceCoupling>& couplings,
                                    const BoundaryData& bd) const {
    AssembledSystem sys;
    std::vector<Eigen::Triplet<double>> triplets = volume_triplets_;
    std::vector<Eigen::Triplet<double>> ft = face_triplets(couplings);
    triplets.insert(triplets.end(), ft.begin(), ft.end());
    sys.matrix.resize(dof_map_.size(), dof_map_.size());
    sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
    sys.rhs = assemble_rhs(couplings, bd);
    return sys;
}

Vec2 Assembler::reaction_force(const Eigen::VectorXd& u,
                               const std::vector<FaceCoupling>& couplings,
                               const BoundaryData& bd,
                               int dirichlet_tag) const {
    Vec2 R = Vec2::Zero();
    for (int f = 0; f < static_cast<int>(mesh_.faces.size()); ++f) {
        const Face& face = mesh_.faces[f];
        if (face.interior() || face.kind != FaceKind::Dirichlet ||
            face.boundary_tag != dirichlet_tag)
            continue;

        auto it = bd.dirichlet.find(face.boundary_tag);
        if (it == bd.dirichlet.end())
            throw Error("no Dirichlet data for tag " +
                        std::to_string(face.boundary_tag));
        Mat2 P, K, S;
        bool skip;
        coupling_matrices(f, couplings[f], P, K, S, skip);
        if (skip) continue;

        const FaceOps& ops = face_ops_[f];
        Eigen::Matrix<double, 12, 1> U = Eigen::Matrix<double, 12, 1>::Zero();
        for (int i = 0; i < ops.n_dofs; ++i) U(i) = u[ops.dof_ids[i]];
        Vec2 flux = ops.flux * U;
        for (int q = 0; q < 2; ++q) {
            Vec2 trace = ops.jump[q] * U;
            Vec2 g = it->second(ops.qpt[q]);
            R += ops.weight *
                 (P * flux - S * (trace - g + K * flux));
        }
    }
    return R;
}

Vec2 Assembler::face_traction(const Eigen::VectorXd& u,
                              const FaceCoupling& coupling, int face) const {
    Mat2 P, K, S;
    bool skip;
    coupling_matrices(face, coupling, P, K, S, skip);
    if (skip) return Vec2::Zero();

    const FaceOps& ops = face_ops_[face];
    Eigen::Matrix<double, 12, 1> U = Eigen::Matrix<double, 12, 1>::Zero();
    for (int i = 0; i < ops.n_dofs; ++i) U(i) = u[ops.dof_ids[i]];
    Vec2 flux = ops.flux * U;
    Vec2 t_h = Vec2::Zero();
    for (int q = 0; q < 2; ++q) {
        Vec2 trace = ops.jump[q] * U;
        t_h += 0.5 * (P * flux - S * (trace + K * flux));
    }
    const Face& f = mesh_.faces[face];
    return Vec2(t_h.dot(f.normal), t_h.dot(f.tangent));
}

Vec2 Assembler::face_jump(const Eigen::VectorXd& u, int face) const {
    const FaceOps& ops = face_ops_[face];
    Eigen::Matrix<double, 12, 1> U = Eigen::Matrix<double, 12, 1>::Zero();
    for (int i = 0; i < ops.n_dofs; ++i) U(i) = u[ops.dof_ids[i]];
    return 0.5 * (ops.jump[0] * U + ops.jump[1] * U);
}

Vec2 Assembler::face_separation(const Eigen::VectorXd& u, int face) const {
    Vec2 opening = -face_jump(u, face);
    const Face& f = mesh_.faces[face];
    return Vec2(opening.dot(f.normal), opening.dot(f.tangent));
}

Mat2 Assembler::element_strain(const Eigen::VectorXd& u, int elem) const {
    Eigen::Matrix<double, 6, 1> ue;
    for (int i = 0; i < 6; ++i) ue(i) = u[6 * elem + i];
    Eigen::Vector3d voigt = element_ops_[elem].B * ue;
    Mat2 eps;
    eps << voigt(0), 0.5 * voigt(2), 0.5 * voigt(2), voigt(1);
    return eps;
}

Mat2 Assembler::element_stress(const Eigen::VectorXd& u, int elem) const {
    Eigen::Matrix<double, 6, 1> ue;
    for (int i = 0; i < 6; ++i) ue(i) = u[6 * elem + i];
    Eigen::Vector3d voigt = element_ops_[elem].DB * ue;
    Mat2 sig;
    sig << voigt(0), voigt(2), voigt(2), voigt(1);
    return sig;
}

}  // namespace czdg
