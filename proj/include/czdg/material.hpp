#pragma once

#include <map>
#include <utility>

#include "czdg/core.hpp"

namespace czdg {

struct Mesh;

// Plane-strain isotropic elasticity.
struct IsotropicElastic {
    double E = 0.0;
    double nu = 0.0;
    double lambda = 0.0;  // Lame's first parameter
    double mu = 0.0;      // shear modulus

    static IsotropicElastic from_E_nu(double E, double nu);
};

// lambda = E*nu / ((1+nu)(1-2nu)), mu = E / (2(1+nu)). Requires E > 0 and
// nu in [0, 0.5).
std::pair<double, double> lame_from_E_nu(double E, double nu);

// sigma = lambda tr(eps) I + 2 mu eps
Mat2 stress(const Mat2& strain, const IsotropicElastic& mat);

// Nitsche penalty scale gamma = (2 mu + 3 lambda) * gamma0, which equals
// E / (1 - 2 nu) * gamma0 in plane strain.
double penalty_gamma(const IsotropicElastic& mat, double gamma0);

// Region tag -> material. Every region tag present in the mesh must have an
// entry before assembly.
class MaterialField {
public:
    void set(int region_tag, const IsotropicElastic& mat);
    const IsotropicElastic& at(int region_tag) const;
    void validate_covers(const Mesh& mesh) const;
    const std::map<int, IsotropicElastic>& entries() const { return by_tag_; }

private:
    std::map<int, IsotropicElastic> by_tag_;
};

}  // namespace czdg
