#include "czdg/verify.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/LU>

#include "czdg/cohesive.hpp"
#include "czdg/dg_core.hpp"
#include "czdg/mesh.hpp"
#include "czdg/solver.hpp"

namespace czdg {

namespace {

constexpr double kPi = 3.14159265358979323846;

double least_squares_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
    double xm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= static_cast<double>(x.size());
    ym /= static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    return num / den;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// Degree-4 quadrature on the reference triangle: two orbits of three points,
// weights normalized to sum to one.
struct QuadPoint {
    double b0, b1, b2;  // barycentric coordinates
    double w;
};

std::vector<QuadPoint> triangle_quadrature() {
    const double a1 = 0.445948490915965;
    const double w1 = 0.223381589678011;
    const double a2 = 0.091576213509771;
    const double w2 = 0.109951743655322;
    std::vector<QuadPoint> q;
    for (double a : {a1, a2}) {
        double w = (a == a1) ? w1 : w2;
        q.push_back({1.0 - 2.0 * a, a, a, w});
        q.push_back({a, 1.0 - 2.0 * a, a, w});
        q.push_back({a, a, 1.0 - 2.0 * a, w});
    }
    return q;
}

double triangle_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    return 0.5 * std::abs((p1.x() - p0.x()) * (p2.y() - p0.y()) -
                          (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

}  // namespace

bool VerifyReport::all_passed() const {
    for (const auto& c : checks)
        if (!c.passed()) return false;
    return true;
}

// Uniaxial tension sigma0 across a unit square split by one vertical column
// of compliant faces with K = beta I. The exact solution is affine on each
// side with a constant opening beta * sigma0 across the column, and the
// method reproduces it to solver precision.
VerifyReport verify_patch() {
    const double sigma0 = 1.0;
    const double beta = 0.01;
    const double E = 1.0, nu = 0.3;

    BoundaryKindMap kinds;
    kinds[rect_tags::left] = FaceKind::Dirichlet;
    kinds[rect_tags::right] = FaceKind::Neumann;
    kinds[rect_tags::top] = FaceKind::Neumann;
    kinds[rect_tags::bottom] = FaceKind::Neumann;
    Mesh mesh = generate_rect(1.0, 1.0, 4, 4, {}, false, kinds);

    MaterialField materials;
    materials.set(0, IsotropicElastic::from_E_nu(E, nu));
    Assembler assembler(mesh, materials, 10.0);

    // Plane strain, uniaxial stress sigma_xx = sigma0.
    const double ex = sigma0 * (1.0 - nu * nu) / E;
    const double ey = -nu * (1.0 + nu) * sigma0 / E;

    BoundaryData bd;
    bd.dirichlet[rect_tags::left] = [ey](const Vec2& p) {
        return Vec2(0.0, ey * p.y());
    };
    bd.neumann[rect_tags::right] = [sigma0](const Vec2&) {
        return Vec2(sigma0, 0.0);
    };
    bd.neumann[rect_tags::top] = [](const Vec2&) { return Vec2::Zero().eval(); };
    bd.neumann[rect_tags::bottom] = [](const Vec2&) {
        return Vec2::Zero().eval();
    };

    auto couplings = assembler.rigid_couplings();
    std::vector<int> column;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        const Face& face = mesh.faces[f];
        if (!face.interior()) continue;
        Vec2 a = mesh.node_pos(face.nodes[0]);
        Vec2 b = mesh.node_pos(face.nodes[1]);
        if (std::abs(a.x() - 0.5) < 1e-12 && std::abs(b.x() - 0.5) < 1e-12) {
            couplings[f].mode = FaceCoupling::Mode::Cohesive;
            couplings[f].K = beta * Mat2::Identity();
            column.push_back(f);
        }
    }

    AssembledSystem sys = assembler.assemble(couplings, bd);
    Eigen::VectorXd u = linear_solve(sys.matrix, sys.rhs);

    double jump_err = 0.0;
    for (int f : column) {
        Vec2 sep = assembler.face_separation(u, f);
        jump_err = std::max(jump_err, std::abs(sep.x() - beta * sigma0));
        jump_err = std::max(jump_err, std::abs(sep.y()));
    }
    jump_err /= beta * sigma0;

    double tied_jump = 0.0;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        const Face& face = mesh.faces[f];
        if (!face.interior()) continue;
        if (std::abs(mesh.face_midpoint(f).x() - 0.5) < 1e-12) continue;
        tied_jump = std::max(tied_jump, assembler.face_jump(u, f).norm());
    }

    double disp_err = 0.0, disp_scale = 0.0;
    const DofMap& dofs = assembler.dofs();
    for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e) {
        const Triangle& tri = mesh.triangles[e];
        Vec2 centroid = (mesh.node_pos(tri.nodes[0]) + mesh.node_pos(tri.nodes[1]) +
                         mesh.node_pos(tri.nodes[2])) /
                        3.0;
        double shift = centroid.x() > 0.5 ? beta * sigma0 : 0.0;
        for (int v = 0; v < 3; ++v) {
            Vec2 p = mesh.node_pos(tri.nodes[v]);
            Vec2 exact(ex * p.x() + shift, ey * p.y());
            Vec2 uh(u[dofs(e, v, 0)], u[dofs(e, v, 1)]);
            disp_err = std::max(disp_err, (uh - exact).norm());
            disp_scale = std::max(disp_scale, exact.norm());
        }
    }

    VerifyReport r;
    r.checks.push_back({"patch.interface_jump", jump_err, 1e-10, true,
                        "opening vs beta*sigma0 across the compliant column"});
    r.checks.push_back({"patch.tied_jump", tied_jump, 1e-10, true,
                        "largest jump on the rigid interior faces"});
    r.checks.push_back({"patch.displacement", disp_err / disp_scale, 1e-10, true,
                        "nodal error vs the affine solution"});
    return r;
}

// Manufactured solution on the unit square with rigid interfaces:
//   u_x = sin(pi x) sin(pi y),  u_y = x (1 - x) y (1 - y)
// which vanishes on the boundary. P1 elements give order 2 in L2 and
// order 1 in the energy norm.
VerifyReport verify_convergence() {
    const double E = 1.0, nu = 0.3;
    auto [lambda, mu] = lame_from_E_nu(E, nu);

    auto exact = [](const Vec2& p) {
        return Vec2(std::sin(kPi * p.x()) * std::sin(kPi * p.y()),
                    p.x() * (1.0 - p.x()) * p.y() * (1.0 - p.y()));
    };
    auto exact_strain = [](const Vec2& p) {
        double x = p.x(), y = p.y();
        double exx = kPi * std::cos(kPi * x) * std::sin(kPi * y);
        double eyy = (x - x * x) * (1.0 - 2.0 * y);
        double exy = 0.5 * (kPi * std::sin(kPi * x) * std::cos(kPi * y) +
                            (1.0 - 2.0 * x) * (y - y * y));
        Mat2 e;
        e << exx, exy, exy, eyy;
        return e;
    };
    auto body = [lambda, mu](const Vec2& p, int) {
        double x = p.x(), y = p.y();
        double ss = std::sin(kPi * x) * std::sin(kPi * y);
        double cc = std::cos(kPi * x) * std::cos(kPi * y);
        double fx = (lambda + 3.0 * mu) * kPi * kPi * ss -
                    (lambda + mu) * (1.0 - 2.0 * x) * (1.0 - 2.0 * y);
        double fy = -(lambda + mu) * kPi * kPi * cc +
                    2.0 * mu * (y - y * y) +
                    2.0 * (lambda + 2.0 * mu) * (x - x * x);
        return Vec2(fx, fy);
    };

    BoundaryKindMap kinds;
    for (int t : {rect_tags::bottom, rect_tags::top, rect_tags::left,
                  rect_tags::right})
        kinds[t] = FaceKind::Dirichlet;

    BoundaryData bd;
    for (int t : {rect_tags::bottom, rect_tags::top, rect_tags::left,
                  rect_tags::right})
        bd.dirichlet[t] = exact;
    bd.body_force = body;

    auto quad = triangle_quadrature();

    std::vector<double> log_h, log_l2, log_en;
    std::string l2_note = "errors", en_note = "errors";
    for (int nx : {4, 8, 16, 32}) {
        Mesh mesh = generate_rect(1.0, 1.0, nx, nx, {}, true, kinds);
        MaterialField materials;
        materials.set(0, IsotropicElastic::from_E_nu(E, nu));
        Assembler assembler(mesh, materials, 10.0);

        auto couplings = assembler.rigid_couplings();
        AssembledSystem sys = assembler.assemble(couplings, bd);
        Eigen::VectorXd u = linear_solve(sys.matrix, sys.rhs);

        const DofMap& dofs = assembler.dofs();
        double l2 = 0.0, en = 0.0;
        for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e) {
            const Triangle& tri = mesh.triangles[e];
            Vec2 p0 = mesh.node_pos(tri.nodes[0]);
            Vec2 p1 = mesh.node_pos(tri.nodes[1]);
            Vec2 p2 = mesh.node_pos(tri.nodes[2]);
            double area = triangle_area(p0, p1, p2);
            Mat2 strain_h = assembler.element_strain(u, e);
            for (const auto& q : quad) {
                Vec2 x = q.b0 * p0 + q.b1 * p1 + q.b2 * p2;
                Vec2 uh = q.b0 * Vec2(u[dofs(e, 0, 0)], u[dofs(e, 0, 1)]) +
                          q.b1 * Vec2(u[dofs(e, 1, 0)], u[dofs(e, 1, 1)]) +
                          q.b2 * Vec2(u[dofs(e, 2, 0)], u[dofs(e, 2, 1)]);
                l2 += area * q.w * (uh - exact(x)).squaredNorm();

                Mat2 de = strain_h - exact_strain(x);
                double tr = de(0, 0) + de(1, 1);
                en += area * q.w *
                      (lambda * tr * tr + 2.0 * mu * de.squaredNorm());
            }
        }
        log_h.push_back(std::log(1.0 / nx));
        log_l2.push_back(std::log(std::sqrt(l2)));
        log_en.push_back(std::log(std::sqrt(en)));
        l2_note += " " + number(std::sqrt(l2));
        en_note += " " + number(std::sqrt(en));
    }

    VerifyReport r;
    r.checks.push_back({"convergence.l2_rate",
                        least_squares_slope(log_h, log_l2), 1.9, false,
                        l2_note});
    r.checks.push_back({"convergence.energy_rate",
                        least_squares_slope(log_h, log_en), 0.9, false,
                        en_note});
    return r;
}

// The blended stiffness S_h = (h/gamma I + K)^{-1} tends to K^{-1} linearly
// in the face size, and is exactly gamma/h I for a rigid interface.
VerifyReport verify_limits() {
    Mat2 K;
    K << 2.0e-3, 5.0e-4, 5.0e-4, 1.0e-3;
    const double gamma = 1.0e4;
    Mat2 K_inv = K.inverse();

    std::vector<double> log_h, log_err;
    std::string note = "rel errors";
    double rigid_err = 0.0;
    for (double h : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
        Mat2 S = interface_stiffness_S_h(K, h, gamma);
        double rel = (S - K_inv).norm() / K_inv.norm();
        log_h.push_back(std::log(h));
        log_err.push_back(std::log(rel));
        note += " " + number(rel);

        Mat2 S0 = interface_stiffness_S_h(Mat2::Zero(), h, gamma);
        rigid_err = std::max(
            rigid_err,
            (S0 - (gamma / h) * Mat2::Identity()).norm() / (gamma / h));
    }

    double slope = least_squares_slope(log_h, log_err);

    VerifyReport r;
    r.checks.push_back({"limits.slope_low", slope, 0.9, false,
                        "fitted order of |S_h - K^-1| in h"});
    r.checks.push_back({"limits.slope_high", slope, 1.1, true, note});
    r.checks.push_back({"limits.rigid_identity", rigid_err, 1e-12, true,
                        "S_h vs gamma/h I at K = 0"});
    return r;
}

// Envelope tractions are the gradient of the mixed-mode energy surface;
// compare against central differences on an interior grid of the damage
// coordinate and the mode angle.
VerifyReport verify_cohesive_grad() {
    CohesiveParams p;
    p.normal = {1.0, 0.02};
    p.tangential = {1.5, 0.03};
    p.validate();

    auto surface = [&p](double un, double ut) {
        return gamma_surface(effective_separation(un, ut, p),
                             mode_mix(un, ut, p), p);
    };

    const int n = 20;
    const double hn = 1e-5 * p.u_nc();
    const double ht = 1e-5 * p.u_tc();
    double max_rel = 0.0;
    for (int i = 1; i <= n; ++i) {
        double lam = static_cast<double>(i) / (n + 1);
        for (int j = 1; j <= n; ++j) {
            double phi = static_cast<double>(j) / (n + 1) * kPi / 2.0;
            double un = lam * p.u_nc() * std::sin(phi);
            double ut = lam * p.u_tc() * std::cos(phi);

            FaceState state;
            state.lambda_max = lam;
            Vec2 t = tractions(un, ut, state, p);
            Vec2 fd((surface(un + hn, ut) - surface(un - hn, ut)) / (2.0 * hn),
                    (surface(un, ut + ht) - surface(un, ut - ht)) / (2.0 * ht));
            max_rel = std::max(max_rel, (fd - t).norm() / t.norm());
        }
    }

    VerifyReport r;
    r.checks.push_back({"cohesive_grad.envelope", max_rel, 1e-6, true,
                        "tractions vs finite differences, 20x20 grid"});
    return r;
}

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names = {
        "patch", "convergence", "limits", "cohesive-grad"};
    return names;
}

VerifyReport run_verify_suite(const std::string& suite) {
    if (suite == "patch") return verify_patch();
    if (suite == "convergence") return verify_convergence();
    if (suite == "limits") return verify_limits();
    if (suite == "cohesive-grad") return verify_cohesive_grad();
    throw Error("unknown verify suite '" + suite +
                "' (choose from patch, convergence, limits, cohesive-grad)");
}

std::string format_report(const VerifyReport& report) {
    std::string out;
    for (const auto& c : report.checks) {
        out += c.passed() ? "PASS " : "FAIL ";
        out += c.name;
        out += " measured=" + number(c.measured);
        out += std::string(" bound") + (c.upper ? "<=" : ">=") + number(c.bound);
        if (!c.note.empty()) out += "  (" + c.note + ")";
        out += "\n";
    }
    return out;
}

}  // namespace czdg
