#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "czdg/dg_core.hpp"
#include "doctest.h"

using namespace czdg;

namespace {

Mesh one_triangle() {
    std::string text =
        "$Nodes\n3\n0 0 0\n1 1 0\n2 0 1\n"
        "$Triangles\n1\n0 0 0 1 2\n"
        "$BoundaryEdges\n3\n0 1 0 1\n1 2 1 2\n2 3 2 0\n";
    return read_mesh(text);
}

MaterialField single_material(double E, double nu) {
    MaterialField f;
    f.set(0, IsotropicElastic::from_E_nu(E, nu));
    return f;
}

Eigen::MatrixXd dense_from_triplets(
    const std::vector<Eigen::Triplet<double>>& ts, int n) {
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(ts.begin(), ts.end());
    return Eigen::MatrixXd(A);
}

// Fills a DG vector with the values of a pointwise field at the element
// vertices.
Eigen::VectorXd interpolate(const Mesh& m, const DofMap& dofs,
                            const std::function<Vec2(const Vec2&)>& field) {
    Eigen::VectorXd u(dofs.size());
    for (int e = 0; e < dofs.n_elements; ++e)
        for (int v = 0; v < 3; ++v) {
            Vec2 val = field(m.node_pos(m.triangles[e].nodes[v]));
            u[dofs(e, v, 0)] = val.x();
            u[dofs(e, v, 1)] = val.y();
        }
    return u;
}

BoundaryKindMap all_dirichlet() {
    return {{rect_tags::bottom, FaceKind::Dirichlet},
            {rect_tags::top, FaceKind::Dirichlet},
            {rect_tags::left, FaceKind::Dirichlet},
            {rect_tags::right, FaceKind::Dirichlet}};
}

}  // namespace

TEST_CASE("dof map layout") {
    DofMap d;
    d.n_elements = 5;
    CHECK(d.size() == 30);
    CHECK(d(0, 0, 0) == 0);
    CHECK(d(0, 2, 1) == 5);
    CHECK(d(3, 1, 0) == 20);
}

TEST_CASE("single element stiffness") {
    Mesh m = one_triangle();
    Assembler asmb(m, single_material(1.0, 0.0), 10.0);
    Eigen::MatrixXd Ke = dense_from_triplets(asmb.volume_triplets(), 6);

    Eigen::MatrixXd expect(6, 6);
    expect << 0.75, 0.25, -0.5, -0.25, -0.25, 0.0,
              0.25, 0.75, 0.0, -0.25, -0.25, -0.5,
              -0.5, 0.0, 0.5, 0.0, 0.0, 0.0,
              -0.25, -0.25, 0.0, 0.25, 0.25, 0.0,
              -0.25, -0.25, 0.0, 0.25, 0.25, 0.0,
              0.0, -0.5, 0.0, 0.0, 0.0, 0.5;
    CHECK((Ke - expect).cwiseAbs().maxCoeff() < 1e-14);

    // rigid translations produce no force
    Eigen::VectorXd tx(6), ty(6);
    tx << 1, 0, 1, 0, 1, 0;
    ty << 0, 1, 0, 1, 0, 1;
    CHECK((Ke * tx).norm() < 1e-14);
    CHECK((Ke * ty).norm() < 1e-14);
}

TEST_CASE("element strain and stress") {
    Mesh m = one_triangle();
    Assembler asmb(m, single_material(10.0, 0.45), 10.0);
    Eigen::VectorXd u = interpolate(m, asmb.dofs(), [](const Vec2& x) {
        return Vec2(0.02 * x.x() + 0.03 * x.y(), 0.01 * x.x() - 0.02 * x.y());
    });

    Mat2 eps = asmb.element_strain(u, 0);
    CHECK(eps(0, 0) == doctest::Approx(0.02).epsilon(1e-13));
    CHECK(eps(1, 1) == doctest::Approx(-0.02).epsilon(1e-13));
    CHECK(eps(0, 1) == doctest::Approx(0.02).epsilon(1e-13));
    CHECK(eps(1, 0) == doctest::Approx(0.02).epsilon(1e-13));

    Mat2 sig = asmb.element_stress(u, 0);
    Mat2 ref = stress(eps, IsotropicElastic::from_E_nu(10.0, 0.45));
    CHECK((sig - ref).norm() < 1e-13);
}

TEST_CASE("face gamma takes the stiffer side") {
    RegionRule right_half{[](const Vec2& c) { return c.x() > 0.5; }, 1};
    Mesh m = generate_rect(1.0, 1.0, 2, 1, {right_half}, false);
    MaterialField mats;
    mats.set(0, IsotropicElastic::from_E_nu(10.0, 0.45));  // gamma0*100
    mats.set(1, IsotropicElastic::from_E_nu(1.0, 0.0));    // gamma0*1
    Assembler asmb(m, mats, 10.0);

    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        const Face& face = m.faces[f];
        bool plus_soft = m.triangles[face.plus_elem].region_tag == 1;
        bool minus_soft =
            face.interior() && m.triangles[face.minus_elem].region_tag == 1;
        double expect =
            (plus_soft && (!face.interior() || minus_soft)) ? 10.0 : 1000.0;
        CHECK(asmb.face_gamma(static_cast<int>(f)) ==
              doctest::Approx(expect).epsilon(1e-13));
    }
}

TEST_CASE("face jump and separation sign convention") {
    Mesh m = generate_rect(1.0, 1.0, 2, 1, {}, false);
    Assembler asmb(m, single_material(1.0, 0.0), 10.0);

    int mid = -1;
    for (std::size_t f = 0; f < m.faces.size(); ++f)
        if (m.faces[f].interior() &&
            std::abs(std::abs(m.faces[f].normal.x()) - 1.0) < 1e-12)
            mid = static_cast<int>(f);
    REQUIRE(mid >= 0);
    const Face& face = m.faces[mid];

    // displace the minus element along +normal and +tangent: that opens a
    // gap of alpha and slides by beta
    const double alpha = 3e-3, beta = -2e-3;
    Eigen::VectorXd u = Eigen::VectorXd::Zero(asmb.dofs().size());
    for (int v = 0; v < 3; ++v) {
        Vec2 d = alpha * face.normal + beta * face.tangent;
        u[asmb.dofs()(face.minus_elem, v, 0)] = d.x();
        u[asmb.dofs()(face.minus_elem, v, 1)] = d.y();
    }

    Vec2 jump = asmb.face_jump(u, mid);
    Vec2 expect_jump = -(alpha * face.normal + beta * face.tangent);
    CHECK((jump - expect_jump).norm() < 1e-14);

    Vec2 sep = asmb.face_separation(u, mid);
    CHECK(sep.x() == doctest::Approx(alpha).epsilon(1e-13));
    CHECK(sep.y() == doctest::Approx(beta).epsilon(1e-13));
}

TEST_CASE("rigid couplings reproduce linear fields exactly") {
    Mesh m = generate_rect(1.0, 1.0, 3, 3, {}, true, all_dirichlet());
    Assembler asmb(m, single_material(7.0, 0.3), 10.0);

    auto field = [](const Vec2& x) {
        return Vec2(0.1 + 0.02 * x.x() + 0.03 * x.y(),
                    -0.05 + 0.01 * x.x() - 0.02 * x.y());
    };
    BoundaryData bd;
    for (int tag = 1; tag <= 4; ++tag) bd.dirichlet[tag] = field;

    AssembledSystem sys = asmb.assemble(asmb.rigid_couplings(), bd);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
    REQUIRE(ldlt.info() == Eigen::Success);
    Eigen::VectorXd u = ldlt.solve(sys.rhs);

    Eigen::VectorXd exact = interpolate(m, asmb.dofs(), field);
    CHECK((u - exact).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("reaction force matches the uniform strain state") {
    Mesh m = generate_rect(1.0, 1.0, 3, 3, {}, true, all_dirichlet());
    Assembler asmb(m, single_material(7.0, 0.3), 10.0);
    auto field = [](const Vec2& x) { return Vec2(0.01 * x.x(), 0.0); };
    BoundaryData bd;
    for (int tag = 1; tag <= 4; ++tag) bd.dirichlet[tag] = field;

    std::vector<FaceCoupling> rc = asmb.rigid_couplings();
    AssembledSystem sys = asmb.assemble(rc, bd);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(sys.matrix);
    Eigen::VectorXd u = ldlt.solve(sys.rhs);

    // sigma_xx = (lambda + 2 mu) * 0.01 through every vertical section
    auto [lambda, mu] = lame_from_E_nu(7.0, 0.3);
    Vec2 right = asmb.reaction_force(u, rc, bd, rect_tags::right);
    CHECK(right.x() ==
          doctest::Approx((lambda + 2 * mu) * 0.01).epsilon(1e-9));
    CHECK(std::abs(right.y()) < 1e-10);

    Vec2 left = asmb.reaction_force(u, rc, bd, rect_tags::left);
    CHECK((left + right).norm() < 1e-10);

    Vec2 top = asmb.reaction_force(u, rc, bd, rect_tags::top);
    CHECK(top.y() == doctest::Approx(lambda * 0.01).epsilon(1e-9));

    // all four reactions balance: no body force
    Vec2 bottom = asmb.reaction_force(u, rc, bd, rect_tags::bottom);
    CHECK((left + right + top + bottom).norm() < 1e-10);
}

TEST_CASE("neumann and body loads integrate exactly") {
    BoundaryKindMap kinds{{rect_tags::left, FaceKind::Dirichlet}};
    Mesh m = generate_rect(1.0, 1.0, 3, 3, {}, true, kinds);
    Assembler asmb(m, single_material(7.0, 0.3), 10.0);

    BoundaryData bd;
    bd.dirichlet[rect_tags::left] = [](const Vec2&) { return Vec2(0, 0); };
    bd.neumann[rect_tags::right] = [](const Vec2&) { return Vec2(2.5, 0); };
    bd.neumann[rect_tags::top] = [](const Vec2&) { return Vec2(0, 0); };
    bd.neumann[rect_tags::bottom] = [](const Vec2&) { return Vec2(0, 0); };
    bd.body_force = [](const Vec2&, int) { return Vec2(0.0, -3.0); };

    Eigen::VectorXd rhs = asmb.assemble_rhs(asmb.rigid_couplings(), bd);

    // traction and gravity resultants; the Dirichlet edge contributes g = 0
    double fx = 0.0, fy = 0.0;
    for (int e = 0; e < asmb.dofs().n_elements; ++e)
        for (int v = 0; v < 3; ++v) {
            fx += rhs[asmb.dofs()(e, v, 0)];
            fy += rhs[asmb.dofs()(e, v, 1)];
        }
    CHECK(fx == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(fy == doctest::Approx(-3.0).epsilon(1e-12));

    // a Neumann tag without data is an error
    BoundaryData incomplete;
    incomplete.dirichlet[rect_tags::left] = [](const Vec2&) {
        return Vec2(0, 0);
    };
    CHECK_THROWS_AS(asmb.assemble_rhs(asmb.rigid_couplings(), incomplete),
                    Error);
}

TEST_CASE("assembled matrix is symmetric across coupling modes") {
    BoundaryKindMap kinds{{rect_tags::left, FaceKind::Dirichlet},
                          {rect_tags::right, FaceKind::Dirichlet}};
    Mesh m = generate_rect(1.0, 1.0, 2, 2, {}, true, kinds);
    Assembler asmb(m, single_material(10.0, 0.45), 10.0);

    std::vector<FaceCoupling> cs = asmb.rigid_couplings();
    int mode = 0;
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        if (!m.faces[f].interior()) continue;
        switch (mode++ % 4) {
            case 0:
                break;  // keep rigid
            case 1:
                cs[f].mode = FaceCoupling::Mode::Cohesive;
                cs[f].K = Vec2(0.02, 0.035).asDiagonal();
                break;
            case 2:
                cs[f].mode = FaceCoupling::Mode::Contact;
                break;
            case 3:
                cs[f].mode = FaceCoupling::Mode::FreeOpen;
                break;
        }
    }

    BoundaryData bd;
    bd.dirichlet[rect_tags::left] = [](const Vec2&) { return Vec2(0, 0); };
    bd.dirichlet[rect_tags::right] = [](const Vec2&) { return Vec2(1e-3, 0); };
    bd.neumann[rect_tags::top] = [](const Vec2&) { return Vec2(0, 0); };
    bd.neumann[rect_tags::bottom] = [](const Vec2&) { return Vec2(0, 0); };

    AssembledSystem sys = asmb.assemble(cs, bd);
    Eigen::MatrixXd A(sys.matrix);
    double scale = A.cwiseAbs().maxCoeff();
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("all-rigid system is positive definite") {
    Mesh m = generate_rect(1.0, 1.0, 2, 2, {}, true, all_dirichlet());
    Assembler asmb(m, single_material(10.0, 0.45), 10.0);
    BoundaryData bd;
    for (int tag = 1; tag <= 4; ++tag)
        bd.dirichlet[tag] = [](const Vec2&) { return Vec2(0, 0); };

    AssembledSystem sys = asmb.assemble(asmb.rigid_couplings(), bd);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig{
        Eigen::MatrixXd(sys.matrix)};
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("coupling changes keep the sparsity pattern") {
    BoundaryKindMap kinds{{rect_tags::left, FaceKind::Dirichlet}};
    Mesh m = generate_rect(1.0, 1.0, 2, 2, {}, true, kinds);
    Assembler asmb(m, single_material(10.0, 0.45), 10.0);

    auto pattern = [&](const std::vector<FaceCoupling>& cs) {
        std::vector<Eigen::Triplet<double>> ts = asmb.face_triplets(cs);
        Eigen::SparseMatrix<double> A(asmb.dofs().size(), asmb.dofs().size());
        A.setFromTriplets(ts.begin(), ts.end());
        A.makeCompressed();
        std::vector<int> idx(A.innerIndexPtr(),
                             A.innerIndexPtr() + A.nonZeros());
        return std::pair(A.nonZeros(), idx);
    };

    std::vector<FaceCoupling> rigid = asmb.rigid_couplings();
    std::vector<FaceCoupling> open = rigid;
    for (std::size_t f = 0; f < m.faces.size(); ++f)
        if (m.faces[f].interior())
            open[f].mode = FaceCoupling::Mode::FreeOpen;

    auto [n1, idx1] = pattern(rigid);
    auto [n2, idx2] = pattern(open);
    CHECK(n1 == n2);
    CHECK(idx1 == idx2);
}

TEST_CASE("assembly is deterministic") {
    Mesh m = generate_rect(1.0, 1.0, 4, 4, {}, true, all_dirichlet());
    Assembler asmb(m, single_material(10.0, 0.45), 10.0);
    std::vector<FaceCoupling> cs = asmb.rigid_couplings();

    std::vector<Eigen::Triplet<double>> a = asmb.face_triplets(cs);
    std::vector<Eigen::Triplet<double>> b = asmb.face_triplets(cs);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].row() == b[i].row());
        CHECK(a[i].col() == b[i].col());
        CHECK(a[i].value() == b[i].value());
    }
}

TEST_CASE("interior face traction matches the uniform stress state") {
    Mesh m = generate_rect(1.0, 1.0, 2, 2, {}, true, all_dirichlet());
    Assembler asmb(m, single_material(10.0, 0.45), 10.0);
    Eigen::VectorXd u = interpolate(m, asmb.dofs(), [](const Vec2& x) {
        return Vec2(0.01 * x.x(), 0.0);
    });
    std::vector<FaceCoupling> couplings = asmb.rigid_couplings();

    const double lambda = 31.034482758620697;
    const double mu = 3.4482758620689657;
    Mat2 sigma;
    sigma << (lambda + 2.0 * mu) * 0.01, 0.0, 0.0, lambda * 0.01;

    for (int f = 0; f < static_cast<int>(m.faces.size()); ++f) {
        if (!m.faces[f].interior()) continue;
        Vec2 sn = sigma * m.faces[f].normal;
        Vec2 t = asmb.face_traction(u, couplings[f], f);
        CHECK(t.x() ==
              doctest::Approx(sn.dot(m.faces[f].normal)).epsilon(1e-9));
        CHECK(t.y() ==
              doctest::Approx(sn.dot(m.faces[f].tangent)).epsilon(1e-9));
    }
}
