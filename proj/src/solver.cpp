#include "czdg/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <Eigen/IterativeLinearSolvers>

namespace czdg {

Eigen::VectorXd LinearSolver::solve(const Eigen::SparseMatrix<double>& A,
                                    const Eigen::VectorXd& b) {
    if (A.rows() != A.cols() || A.rows() != b.size())
        throw SolveError("linear system dimensions do not match");
    const double b_norm = b.norm();
    if (b_norm == 0.0) return Eigen::VectorXd::Zero(A.rows());

    if (A.rows() != pattern_rows_ || A.nonZeros() != pattern_nnz_) {
        ldlt_.analyzePattern(A);
        pattern_rows_ = A.rows();
        pattern_nnz_ = A.nonZeros();
    }
    ldlt_.factorize(A);

    Eigen::VectorXd x;
    bool have_direct = false;
    if (ldlt_.info() == Eigen::Success) {
        x = ldlt_.solve(b);
        have_direct = true;
        // Iterative refinement: the penalty blocks make the system ill
        // conditioned enough that the raw factorization leaves face jumps
        // polluted at a level the damage bookkeeping would register.
        double resid = (A * x - b).norm();
        for (int pass = 0; pass < 2 && resid > 1e-14 * b_norm; ++pass) {
            x += ldlt_.solve(b - A * x);
            resid = (A * x - b).norm();
        }
        if (resid <= 1e-10 * b_norm) return x;
    }

    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg;
    cg.setTolerance(1e-13);
    cg.setMaxIterations(10 * A.rows());
    cg.compute(A);
    Eigen::VectorXd x_cg =
        have_direct ? cg.solveWithGuess(b, x).eval() : cg.solve(b).eval();
    if ((A * x_cg - b).norm() <= 1e-10 * b_norm) return x_cg;
    throw SolveError(
        "linear solve failed to reach the required residual; the assembled "
        "system is singular or indefinite");
}

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& A,
                             const Eigen::VectorXd& b) {
    LinearSolver solver;
    return solver.solve(A, b);
}

LoadSchedule LoadSchedule::uniform(double delta_max, int n_steps) {
    if (n_steps <= 0)
        throw ConfigError("load schedule needs at least one step");
    if (!(delta_max > 0.0))
        throw ConfigError("load schedule target must be positive");
    LoadSchedule s;
    s.deltas.resize(n_steps);
    for (int k = 1; k <= n_steps; ++k)
        s.deltas[k - 1] =
            delta_max * static_cast<double>(k) / static_cast<double>(n_steps);
    return s;
}

void LoadSchedule::validate() const {
    if (deltas.empty()) throw ConfigError("load schedule is empty");
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        if (!std::isfinite(deltas[i]))
            throw ConfigError("load schedule contains a non-finite value");
        if (i > 0 && deltas[i] < deltas[i - 1])
            throw ConfigError("load schedule must be nondecreasing");
    }
}

namespace {

// A tie whose demand reaches the envelope only up to rounding is in
// equilibrium as it stands; softening starts strictly beyond it.
constexpr double kInitiationMargin = 1e-9;

// First softening point for a face whose tie demands more traction than the
// strength envelope carries: a small opening in the demand's mode direction.
FaceCoupling seeded_coupling(const Vec2& demand, const FaceState& state,
                             const CohesiveParams& p, double seed) {
    double a = std::max(demand.x(), 0.0) / p.normal.sigma_max;
    double b = std::abs(demand.y()) / p.tangential.sigma_max;
    double phi = std::atan2(a, b);
    double sign_t = demand.y() < 0.0 ? -1.0 : 1.0;
    double u_t = sign_t * seed * p.u_tc() * std::cos(phi);
    if (demand.x() > 0.0)
        return evaluate_coupling(seed * p.u_nc() * std::sin(phi), u_t, state,
                                 p);
    return evaluate_coupling(-kRigidLambda * p.u_nc(), u_t, state, p);
}

double triangle_area(const Mesh& mesh, int elem) {
    const auto& n = mesh.triangles[elem].nodes;
    Vec2 a = mesh.nodes[n[0]].pos();
    Vec2 b = mesh.nodes[n[1]].pos();
    Vec2 c = mesh.nodes[n[2]].pos();
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                  (c.x() - a.x()) * (b.y() - a.y()));
}

}  // namespace

QuasiStatic::QuasiStatic(const Assembler& assembler,
                         const CohesiveParams& params,
                         std::function<BoundaryData(double)> boundary_at,
                         NonlinearSettings settings)
    : assembler_(assembler),
      params_(params),
      boundary_at_(std::move(boundary_at)),
      settings_(settings) {
    params_.validate();
    if (!boundary_at_) throw SolveError("boundary data callback is empty");
    if (settings_.tol_rel <= 0.0 || settings_.max_iter < 1 ||
        settings_.relaxation <= 0.0 || settings_.relaxation > 1.0 ||
        settings_.max_bisect < 0 || settings_.initiation_seed < kRigidLambda ||
        settings_.initiation_seed >= 1.0)
        throw SolveError("invalid nonlinear settings");
    const Mesh& mesh = assembler_.mesh();
    const std::size_t n_faces = mesh.faces.size();
    states_.resize(n_faces);
    couplings_ = assembler_.rigid_couplings();
    face_dissipated_.assign(n_faces, 0.0);
    h_over_gamma_.assign(n_faces, 0.0);
    for (std::size_t f = 0; f < n_faces; ++f)
        if (mesh.faces[f].interior())
            h_over_gamma_[f] = compute_h_f(mesh.faces[f], mesh) /
                               assembler_.face_gamma(static_cast<int>(f));
    u_ = Eigen::VectorXd::Zero(assembler_.dofs().size());
}

void QuasiStatic::prefail(const std::vector<int>& faces) {
    const Mesh& mesh = assembler_.mesh();
    for (int f : faces) {
        if (f < 0 || f >= static_cast<int>(mesh.faces.size()))
            throw SolveError("prefail: face id out of range");
        if (!mesh.faces[f].interior())
            throw SolveError("prefail: face " + std::to_string(f) +
                             " is a boundary face");
        states_[f].lambda_max = 1.0;
        states_[f].failed = true;
        couplings_[f].mode = FaceCoupling::Mode::FreeOpen;
        couplings_[f].K = Mat2::Zero();
    }
}

QuasiStatic::Attempt QuasiStatic::iterate(double delta) {
    const BoundaryData bd = boundary_at_(delta);
    const Mesh& mesh = assembler_.mesh();
    const int n_faces = static_cast<int>(mesh.faces.size());

    Attempt a;
    a.couplings = couplings_;
    a.trial = couplings_;
    Eigen::VectorXd u_prev = u_;
    std::vector<Mat2> resid_prev(n_faces, Mat2::Zero());
    std::vector<char> resid_valid(n_faces, 0);
    std::vector<double> omega_f(n_faces, settings_.relaxation);

    struct Overload {
        int face;
        double ratio;
        Vec2 demand;
    };
    struct Release {
        int face;
        double tension;
        FaceCoupling coupling;
    };
    std::vector<char> released(n_faces, 0);

    for (int k = 1; k <= settings_.max_iter; ++k) {
        AssembledSystem sys = assembler_.assemble(a.couplings, bd);
        a.u = linear_.solve(sys.matrix, sys.rhs);
        a.iterations = k;

        std::vector<Release> releases;
        bool closing = false;

        // Rigid and a vanishing cohesive compliance are the same tie; do not
        // let the label difference drive mode decisions or convergence.
        auto tied = [&](const FaceCoupling& c, int f) {
            return c.mode == FaceCoupling::Mode::Rigid ||
                   (c.mode == FaceCoupling::Mode::Cohesive &&
                    c.K.cwiseAbs().maxCoeff() <= 1e-9 * h_over_gamma_[f]);
        };

        for (int f = 0; f < n_faces; ++f) {
            if (!mesh.faces[f].interior()) continue;
            Vec2 sep = assembler_.face_separation(a.u, f);
            // A tie cannot produce a separation beyond its own enforcement
            // resolution; anything smaller is jump measurement noise and
            // must not flip the face label. Overload of a tie is detected
            // from the transmitted traction instead, once the state has
            // settled.
            bool tie_noise =
                tied(a.couplings[f], f) &&
                std::abs(sep.x()) <=
                    h_over_gamma_[f] * params_.normal.sigma_max &&
                std::abs(sep.y()) <=
                    h_over_gamma_[f] * params_.tangential.sigma_max;
            FaceCoupling t =
                tie_noise ? FaceCoupling{}
                          : evaluate_coupling(sep.x(), sep.y(), states_[f],
                                              params_);
            if (t.mode == FaceCoupling::Mode::FreeOpen &&
                a.couplings[f].mode == FaceCoupling::Mode::Contact) {
                // A pressed-shut face releases when its tie turns tensile,
                // not on the sign noise of a zero gap. Releases are also
                // serialized below: neighbouring crack faces otherwise swap
                // open/closed in lockstep forever.
                Vec2 tie = assembler_.face_traction(a.u, a.couplings[f], f);
                if (tie.x() > 0.0 && !released[f])
                    releases.push_back({f, tie.x(), t});
                t = a.couplings[f];
            } else if (t.mode == FaceCoupling::Mode::Contact &&
                       a.couplings[f].mode == FaceCoupling::Mode::FreeOpen) {
                closing = true;
            }
            a.trial[f] = t;
        }

        // At most one contact release per iteration, the most tensile tie
        // first, and none while a penetration is still being closed. A face
        // that was released and pressed shut again is grazing: it keeps its
        // tie for the rest of the attempt, transmitting only noise-level
        // traction.
        if (!closing && !releases.empty()) {
            const Release* best = &releases.front();
            for (const Release& r : releases)
                if (r.tension > best->tension) best = &r;
            a.trial[best->face] = best->coupling;
            released[best->face] = 1;
        }

        bool modes_stable = true;
        double compliance_change = 0.0;
        for (int f = 0; f < n_faces; ++f) {
            if (!mesh.faces[f].interior()) continue;
            const FaceCoupling& t = a.trial[f];
            bool same = t.mode == a.couplings[f].mode;
            if (!same) same = tied(t, f) && tied(a.couplings[f], f);
            if (!same) {
                modes_stable = false;
            } else {
                double scale =
                    std::max(1.0, a.couplings[f].K.cwiseAbs().maxCoeff());
                compliance_change = std::max(
                    compliance_change,
                    (t.K - a.couplings[f].K).cwiseAbs().maxCoeff() / scale);
            }
        }

        double du = (a.u - u_prev).norm();
        bool u_stable = k > 1 && du <= settings_.tol_rel * a.u.norm();
        bool settled =
            modes_stable && (compliance_change <= 1e-12 || u_stable);

        const char* trace_env = std::getenv("CZDG_TRACE");
        bool trace = trace_env && delta >= std::atof(trace_env);
        if (trace) {
            int flips = 0, nrig = 0, ncoh = 0, ncon = 0, nfree = 0;
            for (int f = 0; f < n_faces; ++f) {
                if (!mesh.faces[f].interior()) continue;
                if (a.trial[f].mode != a.couplings[f].mode) ++flips;
                switch (a.trial[f].mode) {
                    case FaceCoupling::Mode::Rigid: ++nrig; break;
                    case FaceCoupling::Mode::Cohesive: ++ncoh; break;
                    case FaceCoupling::Mode::Contact: ++ncon; break;
                    case FaceCoupling::Mode::FreeOpen: ++nfree; break;
                }
            }
            double om_max = 0.0;
            for (int f = 0; f < n_faces; ++f)
                if (resid_valid[f]) om_max = std::max(om_max, omega_f[f]);
            std::fprintf(stderr,
                         "TRACE k=%d du=%.3e dc=%.3e stable=%d settled=%d "
                         "flips=%d rig=%d coh=%d con=%d free=%d om=%.3f\n",
                         k, du / std::max(1e-300, a.u.norm()),
                         compliance_change, modes_stable, settled, flips,
                         nrig, ncoh, ncon, nfree, om_max);
            if (flips > 0 && flips <= 6) {
                for (int f = 0; f < n_faces; ++f) {
                    if (!mesh.faces[f].interior()) continue;
                    if (a.trial[f].mode == a.couplings[f].mode) continue;
                    Vec2 sep = assembler_.face_separation(a.u, f);
                    std::fprintf(
                        stderr,
                        "TRACE   flip f=%d %d->%d sep=(%.3e,%.3e) mid=(%.3f,%.3f)\n",
                        f, static_cast<int>(a.couplings[f].mode),
                        static_cast<int>(a.trial[f].mode), sep.x(), sep.y(),
                        mesh.face_midpoint(f).x(), mesh.face_midpoint(f).y());
                }
            }
        }

        // Activation is event driven: only once the active couplings have
        // equilibrated is a tie allowed to start softening, and then only
        // the most overloaded one (exact ties open together). Seeding from
        // a transient state would damage faces that the settled state
        // leaves below the envelope.
        bool seeded = false;
        if (settled) {
            std::vector<Overload> overloaded;
            for (int f = 0; f < n_faces; ++f) {
                if (!mesh.faces[f].interior()) continue;
                if (a.trial[f].mode != FaceCoupling::Mode::Rigid) continue;
                Vec2 demand = assembler_.face_traction(a.u, a.couplings[f], f);
                double ratio = initiation_ratio(demand, params_);
                if (ratio >= 1.0 + kInitiationMargin)
                    overloaded.push_back({f, ratio, demand});
            }
            if (overloaded.empty()) {
                if (trace) std::fprintf(stderr, "TRACE converged k=%d\n", k);
                a.converged = true;
                return a;
            }
            for (const Overload& o : overloaded) {
                // The equilibrium damage vanishes as the overload does;
                // seeding past it would have to creep back down, so the
                // seed shrinks with the margin above the envelope. An
                // over-seeded face heals back to its tie, so the whole
                // settled overload set opens in one batch.
                double seed = settings_.initiation_seed *
                              std::min(1.0, o.ratio - 1.0);
                a.trial[o.face] = seeded_coupling(
                    o.demand, states_[o.face], params_, seed);
                seeded = true;
                if (trace)
                    std::fprintf(stderr,
                                 "TRACE   seed f=%d ratio=%.6f mid=(%.3f,%.3f)\n",
                                 o.face, o.ratio, mesh.face_midpoint(o.face).x(),
                                 mesh.face_midpoint(o.face).y());
            }
        }

        // The compliance update is a relaxed fixed point, accelerated per
        // face: the contraction rate differs wildly between a face healing
        // back to its tie and one softening past the peak, so each face
        // keeps its own secant estimate of its local map. A negative
        // recommendation means the local map is expansive around an
        // unstable equilibrium; its magnitude is still the right step
        // scale, marching away from the equilibrium instead of towards it.
        for (int f = 0; f < n_faces; ++f) {
            if (!mesh.faces[f].interior()) continue;
            const FaceCoupling& t = a.trial[f];
            FaceCoupling& c = a.couplings[f];
            if (t.mode == c.mode && t.mode == FaceCoupling::Mode::Cohesive) {
                Mat2 r = t.K - c.K;
                if (resid_valid[f]) {
                    Mat2 dr = r - resid_prev[f];
                    double denom = dr.squaredNorm();
                    if (denom > 0.0) {
                        double raw = -omega_f[f] *
                                     (resid_prev[f].array() * dr.array()).sum() /
                                     denom;
                        omega_f[f] =
                            raw > 0.0
                                ? std::clamp(raw, 0.05, 25.0)
                                : std::clamp(-raw, settings_.relaxation, 25.0);
                    }
                }
                Mat2 K = c.K + omega_f[f] * r;
                // An extrapolated compliance must keep the blended face
                // matrix positive definite; fall back if it does not.
                Mat2 M = K + h_over_gamma_[f] * Mat2::Identity();
                double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
                if (!(M(0, 0) > 0.0 && det > 0.0)) K = t.K;
                c.K = K;
                resid_prev[f] = r;
                resid_valid[f] = 1;
            } else {
                c.K = t.K;
                resid_valid[f] = 0;
                omega_f[f] = settings_.relaxation;
            }
            c.mode = t.mode;
            c.lambda_trial = t.lambda_trial;
            c.phi_trial = t.phi_trial;
        }
        u_prev = a.u;
    }
    return a;
}

void QuasiStatic::commit(const Attempt& attempt, double delta) {
    const Mesh& mesh = assembler_.mesh();
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        if (!mesh.faces[f].interior()) continue;
        const FaceCoupling& t = attempt.trial[f];
        FaceState old = states_[f];
        states_[f] = update_state(old, t.lambda_trial);
        if (old.failed || states_[f].lambda_max <= old.lambda_max ||
            states_[f].lambda_max < kRigidLambda)
            continue;
        double spent =
            dissipated_energy(states_[f].lambda_max, t.phi_trial, params_);
        if (spent > face_dissipated_[f]) {
            dissipated_total_ +=
                (spent - face_dissipated_[f]) * mesh.faces[f].length;
            face_dissipated_[f] = spent;
        }
    }
    u_ = attempt.u;
    couplings_ = attempt.couplings;
    delta_ = delta;
}

bool QuasiStatic::advance(double from, double to, int depth,
                          StepResult& result) {
    Attempt attempt = iterate(to);
    result.iterations += attempt.iterations;
    if (attempt.converged) {
        commit(attempt, to);
        return true;
    }
    if (depth >= settings_.max_bisect) return false;
    double mid = 0.5 * (from + to);
    if (!(std::min(from, to) < mid && mid < std::max(from, to))) return false;
    result.bisections = std::max(result.bisections, depth + 1);
    if (!advance(from, mid, depth + 1, result)) return false;
    return advance(mid, to, depth + 1, result);
}

StepResult QuasiStatic::step(double delta, int reaction_tag) {
    if (!std::isfinite(delta))
        throw SolveError("load value must be finite");
    StepResult result;
    result.delta = delta;

    const std::vector<FaceState> states0 = states_;
    const std::vector<FaceCoupling> couplings0 = couplings_;
    const std::vector<double> dissipated0 = face_dissipated_;
    const Eigen::VectorXd u0 = u_;
    const double delta0 = delta_;
    const double total0 = dissipated_total_;

    result.converged = advance(delta_, delta, 0, result);
    if (!result.converged) {
        states_ = states0;
        couplings_ = couplings0;
        face_dissipated_ = dissipated0;
        u_ = u0;
        delta_ = delta0;
        dissipated_total_ = total0;
    }
    result.dissipated_increment = dissipated_total_ - total0;
    result.failed_faces = failed_faces();
    if (result.converged && reaction_tag >= 0)
        result.reaction = assembler_.reaction_force(
            u_, couplings_, boundary_at_(delta_), reaction_tag);
    return result;
}

std::vector<int> QuasiStatic::failed_faces() const {
    std::vector<int> out;
    for (int f = 0; f < static_cast<int>(states_.size()); ++f)
        if (states_[f].failed) out.push_back(f);
    return out;
}

double QuasiStatic::elastic_energy() const {
    const Mesh& mesh = assembler_.mesh();
    double total = 0.0;
    for (int e = 0; e < static_cast<int>(mesh.triangles.size()); ++e) {
        Mat2 eps = assembler_.element_strain(u_, e);
        Mat2 sig = assembler_.element_stress(u_, e);
        total += 0.5 * triangle_area(mesh, e) * sig.cwiseProduct(eps).sum();
    }
    return total;
}

double QuasiStatic::interface_stored_energy() const {
    const Mesh& mesh = assembler_.mesh();
    double total = 0.0;
    for (int f = 0; f < static_cast<int>(mesh.faces.size()); ++f) {
        if (!mesh.faces[f].interior()) continue;
        Vec2 sep = assembler_.face_separation(u_, f);
        total += stored_energy(sep.x(), sep.y(), states_[f], params_) *
                 mesh.faces[f].length;
    }
    return total;
}

}  // namespace czdg
