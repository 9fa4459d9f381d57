#pragma once

#include <functional>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "czdg/dg_core.hpp"

namespace czdg {

// Direct sparse solve with the symbolic factorization reused while the
// sparsity pattern is unchanged. Falls back to conjugate gradients when the
// Cholesky factorization fails or leaves a large residual; throws SolveError
// if neither reaches a relative residual of 1e-10.
class LinearSolver {
public:
    Eigen::VectorXd solve(const Eigen::SparseMatrix<double>& A,
                          const Eigen::VectorXd& b);

private:
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
    Eigen::Index pattern_rows_ = -1;
    Eigen::Index pattern_nnz_ = -1;
};

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& b);

// Prescribed load values, one per step, in the order they are applied.
struct LoadSchedule {
    std::vector<double> deltas;

    static LoadSchedule uniform(double delta_max, int n_steps);
    void validate() const;
};

struct NonlinearSettings {
    double tol_rel = 1e-6;     // relative displacement update for convergence
    int max_iter = 50;         // fixed-point iterations per attempt
    double relaxation = 0.5;   // under-relaxation of the face compliance
    int max_bisect = 5;        // load-increment bisection levels before abort
    double initiation_seed = 0.01;  // lambda at which an overloaded face opens
};

struct StepResult {
    double delta = 0.0;
    bool converged = false;
    int iterations = 0;   // fixed-point iterations summed over sub-steps
    int bisections = 0;   // deepest bisection level used
    std::vector<int> failed_faces;  // sorted ids of fully failed faces
    double dissipated_increment = 0.0;
    Vec2 reaction = Vec2::Zero();
};

// Displacement-controlled quasi-static stepping. Each step fixes the load,
// then iterates: assemble with the current per-face couplings, solve, and
// re-evaluate the couplings from the face separations of the new solution.
// The compliance update is relaxed, with the relaxation factor adapted from
// successive residuals once the face modes have settled. Among the faces
// still rigidly tied, the one whose transmitted traction exceeds the
// strength envelope by the largest margin starts to soften. Face damage is
// committed only when the step has converged; a step that fails to converge
// is retried in bisected increments and leaves no trace if it ultimately
// fails.
class QuasiStatic {
public:
    QuasiStatic(const Assembler& assembler, const CohesiveParams& params,
                std::function<BoundaryData(double)> boundary_at,
                NonlinearSettings settings = {});

    // Marks faces as already failed before any loading.
    void prefail(const std::vector<int>& faces);

    // Advances the load to delta. reaction_tag >= 0 requests the reaction
    // force through that Dirichlet boundary in the result.
    StepResult step(double delta, int reaction_tag = -1);

    const Eigen::VectorXd& solution() const { return u_; }
    const std::vector<FaceState>& states() const { return states_; }
    const std::vector<FaceCoupling>& couplings() const { return couplings_; }
    double delta() const { return delta_; }

    std::vector<int> failed_faces() const;
    double dissipated_total() const { return dissipated_total_; }
    double elastic_energy() const;
    double interface_stored_energy() const;

private:
    struct Attempt {
        bool converged = false;
        int iterations = 0;
        Eigen::VectorXd u;
        std::vector<FaceCoupling> couplings;  // what produced u
        std::vector<FaceCoupling> trial;      // evaluated from u
    };

    Attempt iterate(double delta);
    void commit(const Attempt& attempt, double delta);
    bool advance(double from, double to, int depth, StepResult& result);

    const Assembler& assembler_;
    CohesiveParams params_;
    std::function<BoundaryData(double)> boundary_at_;
    NonlinearSettings settings_;
    LinearSolver linear_;

    std::vector<FaceState> states_;
    std::vector<FaceCoupling> couplings_;
    std::vector<double> face_dissipated_;   // per unit area
    std::vector<double> h_over_gamma_;      // natural compliance scale per face
    Eigen::VectorXd u_;
    double delta_ = 0.0;
    double dissipated_total_ = 0.0;
};

}  // namespace czdg
