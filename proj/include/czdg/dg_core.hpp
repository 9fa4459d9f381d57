#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Sparse>

#include "czdg/cohesive.hpp"
#include "czdg/material.hpp"
#include "czdg/mesh.hpp"

namespace czdg {

// Element-discontinuous P1 vectors: 6 dofs per triangle, vertex-major,
// component-minor.
struct DofMap {
    int n_elements = 0;
    static constexpr int per_element = 6;

    int size() const { return per_element * n_elements; }
    int operator()(int elem, int vertex, int comp) const {
        return per_element * elem + 2 * vertex + comp;
    }
};

struct AssembledSystem {
    Eigen::SparseMatrix<double> matrix;
    Eigen::VectorXd rhs;
};

// Boundary data per tag. Dirichlet tags need g, Neumann tags need h; a tag
// without data is an error at assembly. Body force may vary per region.
struct BoundaryData {
    std::map<int, std::function<Vec2(const Vec2&)>> dirichlet;
    std::map<int, std::function<Vec2(const Vec2&)>> neumann;
    std::function<Vec2(const Vec2&, int region_tag)> body_force;
};

// Assembles the Nitsche-blended cohesive DG system
//
//   sum_T (sigma(u), eps(v))
//   - sum_F < {sigma(u) n}, [v] + K {sigma(v) n} >
//   - sum_F < {sigma(v) n}, [u] + K {sigma(u) n} >
//   + sum_F < {sigma(v) n}, K {sigma(u) n} >
//   + sum_F < S_h ([u] + K {sigma(u) n}), [v] + K {sigma(v) n} >
//
// over interior and Dirichlet faces, with S_h = (h_F/gamma I + K)^{-1} and
// per-face compliance K from the cohesive state (zero for a rigid tie).
// Failed faces drop all coupling in tension and keep a normal-only rigid
// tie when pressed shut.
class Assembler {
public:
    Assembler(const Mesh& mesh, const MaterialField& materials, double gamma0);

    const DofMap& dofs() const { return dof_map_; }
    const Mesh& mesh() const { return mesh_; }

    // One coupling entry per face (Neumann entries ignored).
    std::vector<FaceCoupling> rigid_couplings() const;

    AssembledSystem assemble(const std::vector<FaceCoupling>& couplings,
                             const BoundaryData& bd) const;
    const std::vector<Eigen::Triplet<double>>& volume_triplets() const {
        return volume_triplets_;
    }
    std::vector<Eigen::Triplet<double>> face_triplets(
        const std::vector<FaceCoupling>& couplings) const;
    Eigen::VectorXd assemble_rhs(const std::vector<FaceCoupling>& couplings,
                                 const BoundaryData& bd) const;

    // Net force exerted on the body through the faces of one Dirichlet tag,
    // evaluated from the consistent Nitsche flux
    //   t_h = {sigma(u) n} - S_h ([u] - g + K {sigma(u) n}).
    Vec2 reaction_force(const Eigen::VectorXd& u,
                        const std::vector<FaceCoupling>& couplings,
                        const BoundaryData& bd, int dirichlet_tag) const;

    // Traction transmitted across one face by the consistent Nitsche flux,
    // averaged over the face and returned as (normal, tangential) components
    // with tension positive. Zero for faces the coupling leaves traction-free.
    Vec2 face_traction(const Eigen::VectorXd& u, const FaceCoupling& coupling,
                       int face) const;

    // Jump [u] = u+ - u- at the face midpoint (u+ on boundary faces).
    Vec2 face_jump(const Eigen::VectorXd& u, int face) const;
    // Opening separation (delta_n, delta_t) = components of -[u] in the face
    // frame; positive delta_n is a gap.
    Vec2 face_separation(const Eigen::VectorXd& u, int face) const;

    Mat2 element_strain(const Eigen::VectorXd& u, int elem) const;
    Mat2 element_stress(const Eigen::VectorXd& u, int elem) const;

    double face_gamma(int face) const { return face_gamma_[face]; }

private:
    struct ElementOps {
        double area = 0.0;
        Eigen::Matrix<double, 3, 6> B;   // Voigt strain [exx, eyy, 2exy]
        Eigen::Matrix<double, 3, 6> DB;  // Voigt stress of the basis
    };
    struct FaceOps {
        int n_dofs = 0;                   // 12 interior, 6 boundary
        std::array<int, 12> dof_ids{};
        Eigen::Matrix<double, 2, 12> jump[2];   // per quadrature point
        Eigen::Matrix<double, 2, 12> flux;      // {sigma(.) n}, constant
        Vec2 qpt[2];
        double weight = 0.0;  // |F|/2 per point
    };

    void build_element_ops();
    void build_face_ops();
    Eigen::Vector3d barycentric(int elem, const Vec2& p) const;
    // Projector, compliance and blended stiffness in global coordinates.
    void coupling_matrices(int face, const FaceCoupling& c, Mat2& P, Mat2& K,
                           Mat2& S, bool& skip) const;

    const Mesh& mesh_;
    const MaterialField& materials_;
    double gamma0_;
    DofMap dof_map_;
    std::vector<ElementOps> element_ops_;
    std::vector<FaceOps> face_ops_;
    std::vector<double> face_gamma_;
    std::vector<Eigen::Triplet<double>> volume_triplets_;
};

}  // namespace czdg
