#pragma once

#include "czdg/core.hpp"

namespace czdg {

// Separations below this effective value count as rigid (no compliance).
constexpr double kRigidLambda = 1e-12;

// Linear softening law with no elastic branch: the interface is rigid until
// the traction demand reaches sigma_max, then the transmitted traction
// follows sigma_max * (1 - delta/u_c) down to zero at delta = u_c.
struct PureModeLaw {
    double sigma_max = 0.0;  // peak traction [MPa]
    double u_c = 0.0;        // separation at full failure [mm]

    double traction(double delta) const;
    double energy(double delta) const;  // integral of traction from 0
    double fracture_energy() const { return 0.5 * sigma_max * u_c; }
};

enum class SecantVariant {
    Diagonal,        // (t_n/u_n) n(x)n + (t_t/u_t) t(x)t
    PaperCrossTerms  // adds (t_t/u_n) n(x)t + (t_n/u_t) t(x)n; singular
};

struct CohesiveParams {
    PureModeLaw normal;      // mode I
    PureModeLaw tangential;  // mode II
    SecantVariant secant_variant = SecantVariant::Diagonal;

    double u_nc() const { return normal.u_c; }
    double u_tc() const { return tangential.u_c; }
    void validate() const;
};

// Damage history of one face. lambda_max only grows; failed latches once
// lambda_max reaches 1 (or the face is part of the initial crack).
struct FaceState {
    double lambda_max = 0.0;
    bool failed = false;
};

FaceState update_state(FaceState state, double lambda);

// Mode-mix weight f(phi) = sin^2(phi) and its derivative. phi = pi/2 is pure
// mode I, phi = 0 pure mode II; the derivative vanishing at both ends keeps
// pure-mode tractions uncoupled.
double mode_weight(double phi);
double mode_weight_deriv(double phi);

// phi = atan2(u_n/u_nc, |u_t|/u_tc), defined for u_n >= 0 (opening branch).
// Throws if both separations vanish.
double mode_mix(double u_n, double u_t, const CohesiveParams& p);

// lambda = sqrt((u_n/u_nc)^2 + (u_t/u_tc)^2), so that
// u_n = lambda u_nc sin(phi) and |u_t| = lambda u_tc cos(phi).
double effective_separation(double u_n, double u_t, const CohesiveParams& p);

// Mixed-mode energy surface
//   Gamma(lambda, phi) = f(phi) G_I(lambda u_nc) + (1 - f(phi)) G_II(lambda u_tc)
double gamma_surface(double lambda, double phi, const CohesiveParams& p);

// Interface traction (t_n, t_t) for an opening separation (u_n >= 0).
// On the loading envelope (lambda >= lambda_max) this is the gradient of the
// energy surface; below it the traction unloads along the secant to the
// origin at the current mode mix. Failed faces carry no traction. Throws on
// the rigid branch (lambda < kRigidLambda) and for u_n < 0.
Vec2 tractions(double u_n, double u_t, const FaceState& state,
               const CohesiveParams& p);

enum class SecantKind { Rigid, Finite, Failed };

// Secant stiffness S_T in the face (n, t) frame, satisfying S_T * u = t for
// the diagonal variant. 0/0 entries on the pure-mode axes are replaced by
// the other mode's secant at the same lambda.
struct SecantStiffness {
    SecantKind kind = SecantKind::Rigid;
    Mat2 S = Mat2::Zero();  // valid for Finite; zero for Failed
};
SecantStiffness secant_stiffness(double u_n, double u_t,
                                 const FaceState& state,
                                 const CohesiveParams& p);

// Compliance K_T = S_T^{-1}. Rigid state maps to K_T = 0; a failed state is
// the infinite-compliance marker (kind == Failed, K unused). A singular S_T
// outside those markers is a conditioning error.
struct SecantCompliance {
    SecantKind kind = SecantKind::Rigid;
    Mat2 K = Mat2::Zero();
};
SecantCompliance secant_compliance(const SecantStiffness& s);

// Blended interface stiffness S_h = (h_F/gamma I + K_T)^{-1}.
Mat2 interface_stiffness_S_h(const Mat2& K, double h_f, double gamma);

// Quadratic interaction of a traction demand (n, t components, tension
// positive) against the pure-mode strengths. A rigid face whose demand
// reaches 1 must start softening; compressive normal traction does not
// count towards initiation.
double initiation_ratio(const Vec2& traction, const CohesiveParams& p);

// Energy per unit area irreversibly spent once the face has been driven to
// lambda_max at mode angle phi: the envelope work minus what the secant
// unloading path can still recover.
double dissipated_energy(double lambda_max, double phi,
                         const CohesiveParams& p);

// Recoverable energy per unit area held by the interface springs at the
// given separation (area under the secant back to the origin).
double stored_energy(double u_n, double u_t, const FaceState& state,
                     const CohesiveParams& p);

// Everything face assembly needs for one nonlinear iteration, in the face
// (n, t) frame.
//
//   Rigid:    full Nitsche tie, K = 0
//   Cohesive: finite compliance K (normal entry 0 under compression)
//   Contact:  failed face pressed shut; rigid tie in the normal direction
//             only, tangentially traction-free
//   FreeOpen: failed face opening in tension; no face terms at all
struct FaceCoupling {
    enum class Mode { Rigid, Cohesive, Contact, FreeOpen };
    Mode mode = Mode::Rigid;
    Mat2 K = Mat2::Zero();
    double lambda_trial = 0.0;
    double phi_trial = 1.5707963267948966;
};

FaceCoupling evaluate_coupling(double u_n, double u_t, const FaceState& state,
                               const CohesiveParams& p);

}  // namespace czdg
