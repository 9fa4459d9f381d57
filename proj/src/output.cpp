#include "czdg/output.hpp"

#include <cmath>

#include "czdg/config.hpp"
#include "czdg/material.hpp"

namespace czdg {

std::string steps_csv(const std::vector<StepRow>& rows) {
    std::string out =
        "step,delta_mm,reaction_N_per_mm,failed_faces,iterations,converged\n";
    for (const StepRow& r : rows) {
        out += std::to_string(r.step) + ',' + format_number(r.delta) + ',' +
               format_number(r.reaction) + ',' +
               std::to_string(r.failed_faces) + ',' +
               std::to_string(r.iterations) + ',' +
               (r.converged ? "1" : "0") + '\n';
    }
    return out;
}

namespace {

double von_mises_plane_strain(const Mat2& sig, const Mat2& eps,
                              const IsotropicElastic& mat) {
    double szz = mat.lambda * (eps(0, 0) + eps(1, 1));
    double sxx = sig(0, 0), syy = sig(1, 1), sxy = sig(0, 1);
    double dev = 0.5 * ((sxx - syy) * (sxx - syy) + (syy - szz) * (syy - szz) +
                        (szz - sxx) * (szz - sxx));
    return std::sqrt(dev + 3.0 * sxy * sxy);
}

}  // namespace

std::string vtk_fields(const Assembler& assembler,
                       const MaterialField& materials,
                       const Eigen::VectorXd& u) {
    const Mesh& mesh = assembler.mesh();
    const int n_elems = static_cast<int>(mesh.triangles.size());
    const int n_points = 3 * n_elems;

    std::string out;
    out += "# vtk DataFile Version 3.0\n";
    out += "czdg fields\n";
    out += "ASCII\n";
    out += "DATASET UNSTRUCTURED_GRID\n";

    out += "POINTS " + std::to_string(n_points) + " double\n";
    for (const Triangle& tri : mesh.triangles)
        for (int v : tri.nodes) {
            const Node& n = mesh.nodes[v];
            out += format_number(n.x) + ' ' + format_number(n.y) + " 0\n";
        }

    out += "CELLS " + std::to_string(n_elems) + ' ' +
           std::to_string(4 * n_elems) + '\n';
    for (int e = 0; e < n_elems; ++e)
        out += "3 " + std::to_string(3 * e) + ' ' + std::to_string(3 * e + 1) +
               ' ' + std::to_string(3 * e + 2) + '\n';

    out += "CELL_TYPES " + std::to_string(n_elems) + '\n';
    for (int e = 0; e < n_elems; ++e) out += "5\n";

    out += "POINT_DATA " + std::to_string(n_points) + '\n';
    out += "VECTORS displacement double\n";
    for (int e = 0; e < n_elems; ++e)
        for (int v = 0; v < 3; ++v)
            out += format_number(u[6 * e + 2 * v]) + ' ' +
                   format_number(u[6 * e + 2 * v + 1]) + " 0\n";

    out += "CELL_DATA " + std::to_string(n_elems) + '\n';
    out += "SCALARS region int 1\n";
    out += "LOOKUP_TABLE default\n";
    for (const Triangle& tri : mesh.triangles)
        out += std::to_string(tri.region_tag) + '\n';

    out += "SCALARS von_mises double 1\n";
    out += "LOOKUP_TABLE default\n";
    for (int e = 0; e < n_elems; ++e) {
        Mat2 eps = assembler.element_strain(u, e);
        Mat2 sig = assembler.element_stress(u, e);
        const IsotropicElastic& mat =
            materials.at(mesh.triangles[e].region_tag);
        out += format_number(von_mises_plane_strain(sig, eps, mat)) + '\n';
    }
    return out;
}

std::string failed_faces_csv(const Mesh& mesh,
                             const std::vector<FaceState>& states) {
    std::string out = "face,x_mm,y_mm,lambda_max\n";
    for (std::size_t f = 0; f < states.size(); ++f) {
        if (!states[f].failed) continue;
        Vec2 mid = mesh.face_midpoint(static_cast<int>(f));
        out += std::to_string(f) + ',' + format_number(mid.x()) + ',' +
               format_number(mid.y()) + ',' +
               format_number(states[f].lambda_max) + '\n';
    }
    return out;
}

}  // namespace czdg
