#include "czdg/material.hpp"

#include <string>

#include "czdg/mesh.hpp"

namespace czdg {

std::pair<double, double> lame_from_E_nu(double E, double nu) {
    if (E <= 0.0)
        throw Error("Young's modulus must be positive, got " +
                    std::to_string(E));
    if (nu < 0.0 || nu >= 0.5)
        throw Error("Poisson's ratio must lie in [0, 0.5), got " +
                    std::to_string(nu));
    double lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    double mu = E / (2.0 * (1.0 + nu));
    return {lambda, mu};
}

IsotropicElastic IsotropicElastic::from_E_nu(double E, double nu) {
    auto [lambda, mu] = lame_from_E_nu(E, nu);
    return {E, nu, lambda, mu};
}

Mat2 stress(const Mat2& strain, const IsotropicElastic& mat) {
    return mat.lambda * strain.trace() * Mat2::Identity() +
           2.0 * mat.mu * strain;
}

double penalty_gamma(const IsotropicElastic& mat, double gamma0) {
    if (gamma0 <= 0.0)
        throw Error("gamma0 must be positive, got " + std::to_string(gamma0));
    return (2.0 * mat.mu + 3.0 * mat.lambda) * gamma0;
}

void MaterialField::set(int region_tag, const IsotropicElastic& mat) {
    by_tag_[region_tag] = mat;
}

const IsotropicElastic& MaterialField::at(int region_tag) const {
    auto it = by_tag_.find(region_tag);
    if (it == by_tag_.end())
        throw Error("no material assigned to region tag " +
                    std::to_string(region_tag));
    return it->second;
}

void MaterialField::validate_covers(const Mesh& mesh) const {
    std::string missing;
    for (int tag : mesh.region_tags()) {
        if (!by_tag_.count(tag)) {
            if (!missing.empty()) missing += ", ";
            missing += std::to_string(tag);
        }
    }
    if (!missing.empty())
        throw Error("mesh region tags without material: " + missing);
}

}  // namespace czdg
