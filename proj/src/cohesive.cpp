#include "czdg/cohesive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>

namespace czdg {

double PureModeLaw::traction(double delta) const {
    if (delta < 0.0) throw CohesiveError("pure-mode law requires delta >= 0");
    if (delta >= u_c) return 0.0;
    return sigma_max * (1.0 - delta / u_c);
}

double PureModeLaw::energy(double delta) const {
    if (delta < 0.0) throw CohesiveError("pure-mode law requires delta >= 0");
    if (delta >= u_c) return fracture_energy();
    return sigma_max * (delta - delta * delta / (2.0 * u_c));
}

void CohesiveParams::validate() const {
    if (normal.sigma_max <= 0.0 || tangential.sigma_max <= 0.0)
        throw CohesiveError("cohesive strengths must be positive");
    if (normal.u_c <= 0.0 || tangential.u_c <= 0.0)
        throw CohesiveError("critical separations must be positive");
}

FaceState update_state(FaceState state, double lambda) {
    state.lambda_max = std::max(state.lambda_max, lambda);
    if (state.lambda_max >= 1.0) state.failed = true;
    return state;
}

double mode_weight(double phi) {
    double s = std::sin(phi);
    return s * s;
}

double mode_weight_deriv(double phi) { return std::sin(2.0 * phi); }

double mode_mix(double u_n, double u_t, const CohesiveParams& p) {
    if (u_n < 0.0)
        throw CohesiveError("mode_mix is defined on the opening branch only");
    double a = u_n / p.u_nc();
    double b = std::abs(u_t) / p.u_tc();
    if (a == 0.0 && b == 0.0)
        throw CohesiveError("mode mix undefined at zero separation");
    return std::atan2(a, b);
}

double effective_separation(double u_n, double u_t, const CohesiveParams& p) {
    return std::hypot(u_n / p.u_nc(), u_t / p.u_tc());
}

double gamma_surface(double lambda, double phi, const CohesiveParams& p) {
    if (lambda < 0.0) throw CohesiveError("lambda must be nonnegative");
    double f = mode_weight(phi);
    return f * p.normal.energy(lambda * p.u_nc()) +
           (1.0 - f) * p.tangential.energy(lambda * p.u_tc());
}

namespace {

// Gradient of the energy surface at a point on the loading envelope.
Vec2 envelope_traction(double u_n, double u_t, const CohesiveParams& p) {
    const double u_nc = p.u_nc();
    const double u_tc = p.u_tc();
    const double a = u_n / u_nc;
    const double b = std::abs(u_t) / u_tc;
    const double s = u_t < 0.0 ? -1.0 : 1.0;
    const double lambda = std::hypot(a, b);
    const double phi = std::atan2(a, b);

    const double f = mode_weight(phi);
    const double fp = mode_weight_deriv(phi);
    const double GI = p.normal.energy(lambda * u_nc);
    const double GII = p.tangential.energy(lambda * u_tc);
    const double tI = p.normal.traction(lambda * u_nc);
    const double tII = p.tangential.traction(lambda * u_tc);

    // dGamma/dlambda and dGamma/dphi, then the chain rule with
    //   dlambda/du_n = u_n/(u_nc^2 lambda),  dphi/du_n =  b/(lambda^2 u_nc)
    //   dlambda/du_t = u_t/(u_tc^2 lambda),  dphi/du_t = -s a/(lambda^2 u_tc)
    const double dG_dl = f * u_nc * tI + (1.0 - f) * u_tc * tII;
    const double dG_dphi = fp * (GI - GII);

    double t_n = dG_dl * a / (lambda * u_nc) +
                 dG_dphi * b / (lambda * lambda * u_nc);
    double t_t = s * (dG_dl * b / (lambda * u_tc) -
                      dG_dphi * a / (lambda * lambda * u_tc));
    return Vec2(t_n, t_t);
}

// 1D secant slope of one pure-mode law including the unloading branch.
double pure_mode_secant(const PureModeLaw& law, double lambda,
                        double lambda_max) {
    double t;
    if (lambda >= lambda_max) {
        t = law.traction(std::min(lambda, 1.0) * law.u_c);
        if (lambda >= 1.0) return 0.0;
    } else {
        t = law.traction(std::min(lambda_max, 1.0) * law.u_c) *
            (lambda / lambda_max);
    }
    return t / (lambda * law.u_c);
}

}  // namespace

Vec2 tractions(double u_n, double u_t, const FaceState& state,
               const CohesiveParams& p) {
    if (u_n < 0.0)
        throw CohesiveError(
            "tractions() covers the opening branch; compression is handled "
            "by evaluate_coupling()");
    if (state.failed) return Vec2::Zero();

    const double lambda = effective_separation(u_n, u_t, p);
    if (lambda < kRigidLambda)
        throw CohesiveError("rigid branch: traction is indeterminate at "
                            "lambda = " + std::to_string(lambda));

    if (lambda >= state.lambda_max) {
        if (lambda >= 1.0) return Vec2::Zero();
        return envelope_traction(u_n, u_t, p);
    }
    if (state.lambda_max >= 1.0) return Vec2::Zero();
    // Unloading: secant to the origin at the current mode mix.
    const double k = state.lambda_max / lambda;
    return envelope_traction(u_n * k, u_t * k, p) * (lambda / state.lambda_max);
}

SecantStiffness secant_stiffness(double u_n, double u_t,
                                 const FaceState& state,
                                 const CohesiveParams& p) {
    SecantStiffness out;
    const double lambda = effective_separation(u_n, u_t, p);
    if (state.failed || lambda >= 1.0 || state.lambda_max >= 1.0) {
        out.kind = SecantKind::Failed;
        return out;
    }
    if (lambda < kRigidLambda) {
        out.kind = SecantKind::Rigid;
        return out;
    }

    const Vec2 t = tractions(u_n, u_t, state, p);
    const double eps_n = 1e-10 * p.u_nc();
    const double eps_t = 1e-10 * p.u_tc();

    out.kind = SecantKind::Finite;
    double s_nn = u_n > eps_n
                      ? t.x() / u_n
                      : pure_mode_secant(p.normal, lambda, state.lambda_max);
    double s_tt = std::abs(u_t) > eps_t
                      ? t.y() / u_t
                      : pure_mode_secant(p.tangential, lambda,
                                         state.lambda_max);
    out.S(0, 0) = s_nn;
    out.S(1, 1) = s_tt;

    if (p.secant_variant == SecantVariant::PaperCrossTerms) {
        out.S(0, 1) = std::abs(u_n) > eps_n ? t.y() / u_n : 0.0;
        out.S(1, 0) = std::abs(u_t) > eps_t ? t.x() / u_t : 0.0;
    } else if (s_nn < -1e-12 || s_tt < -1e-12) {
        throw CohesiveError("secant stiffness lost positive "
                            "semi-definiteness");
    }
    return out;
}

SecantCompliance secant_compliance(const SecantStiffness& s) {
    SecantCompliance out;
    out.kind = s.kind;
    if (s.kind != SecantKind::Finite) return out;
    double det = s.S.determinant();
    double scale = s.S.cwiseAbs().maxCoeff();
    if (std::abs(det) <= 1e-14 * scale * scale)
        throw CohesiveError("secant stiffness is numerically singular and "
                            "cannot be inverted");
    out.K = s.S.inverse();
    return out;
}

Mat2 interface_stiffness_S_h(const Mat2& K, double h_f, double gamma) {
    if (h_f <= 0.0 || gamma <= 0.0)
        throw CohesiveError("interface stiffness requires h_f > 0, gamma > 0");
    Mat2 M = (h_f / gamma) * Mat2::Identity() + K;
    if (M(0, 0) <= 0.0 || M.determinant() <= 0.0)
        throw CohesiveError("h_F/gamma I + K_T is not positive definite");
    return M.inverse();
}

double initiation_ratio(const Vec2& traction, const CohesiveParams& p) {
    double a = std::max(traction.x(), 0.0) / p.normal.sigma_max;
    double b = traction.y() / p.tangential.sigma_max;
    return std::hypot(a, b);
}

double dissipated_energy(double lambda_max, double phi,
                         const CohesiveParams& p) {
    double lam = std::min(lambda_max, 1.0);
    if (lam < kRigidLambda) return 0.0;
    double surface = gamma_surface(lam, phi, p);
    if (lam >= 1.0) return surface;
    double u_n = lam * p.u_nc() * std::sin(phi);
    double u_t = lam * p.u_tc() * std::cos(phi);
    Vec2 t = tractions(u_n, u_t, FaceState{lam, false}, p);
    return surface - 0.5 * (t.x() * u_n + t.y() * u_t);
}

double stored_energy(double u_n, double u_t, const FaceState& state,
                     const CohesiveParams& p) {
    if (u_n >= 0.0) {
        double lambda = effective_separation(u_n, u_t, p);
        if (state.failed || lambda >= 1.0 || state.lambda_max >= 1.0 ||
            lambda < kRigidLambda)
            return 0.0;
        Vec2 t = tractions(u_n, u_t, state, p);
        return 0.5 * (t.x() * u_n + t.y() * u_t);
    }
    double lambda = std::abs(u_t) / p.u_tc();
    if (state.failed || lambda >= 1.0 || state.lambda_max >= 1.0 ||
        lambda < kRigidLambda)
        return 0.0;
    double s_tt = pure_mode_secant(p.tangential, lambda,
                                   std::max(state.lambda_max, kRigidLambda));
    return 0.5 * std::max(s_tt, 0.0) * u_t * u_t;
}

FaceCoupling evaluate_coupling(double u_n, double u_t, const FaceState& state,
                               const CohesiveParams& p) {
    FaceCoupling out;

    if (u_n < 0.0) {
        // Closed face: rigid contact in the normal direction. The tangential
        // response follows the pure mode II law.
        double lambda = std::abs(u_t) / p.u_tc();
        out.lambda_trial = lambda;
        out.phi_trial = 0.0;
        if (state.failed || lambda >= 1.0 || state.lambda_max >= 1.0) {
            out.mode = FaceCoupling::Mode::Contact;
            return out;
        }
        if (lambda < kRigidLambda) {
            out.mode = FaceCoupling::Mode::Rigid;
            return out;
        }
        out.mode = FaceCoupling::Mode::Cohesive;
        double s_tt = pure_mode_secant(p.tangential, lambda,
                                       std::max(state.lambda_max,
                                                kRigidLambda));
        if (s_tt > 0.0) out.K(1, 1) = 1.0 / s_tt;
        return out;
    }

    double lambda = effective_separation(u_n, u_t, p);
    out.lambda_trial = lambda;
    if (lambda >= kRigidLambda) out.phi_trial = mode_mix(u_n, u_t, p);
    if (state.failed || lambda >= 1.0 || state.lambda_max >= 1.0) {
        out.mode = FaceCoupling::Mode::FreeOpen;
        return out;
    }
    if (lambda < kRigidLambda) {
        out.mode = FaceCoupling::Mode::Rigid;
        return out;
    }
    SecantCompliance c = secant_compliance(secant_stiffness(u_n, u_t, state, p));
    out.mode = FaceCoupling::Mode::Cohesive;
    out.K = c.K;
    return out;
}

}  // namespace czdg
