#pragma once

#include <string>
#include <vector>

#include "czdg/cohesive.hpp"
#include "czdg/dg_core.hpp"

namespace czdg {

// One committed load step as reported in steps.csv.
struct StepRow {
    int step = 0;
    double delta = 0.0;     // prescribed displacement, mm
    double reaction = 0.0;  // reaction per unit thickness, N/mm
    int failed_faces = 0;   // cumulative count
    int iterations = 0;
    bool converged = false;
};

// All writers return the file contents; numbers go through format_number,
// so equal inputs give byte-identical files.

std::string steps_csv(const std::vector<StepRow>& rows);

// Legacy ASCII VTK unstructured grid. Points are duplicated per element so
// the displacement field keeps its jumps; cell data carry the region tag
// and the plane-strain von Mises stress.
std::string vtk_fields(const Assembler& assembler,
                       const MaterialField& materials,
                       const Eigen::VectorXd& u);

// Fully failed faces: id, midpoint, damage. Other faces are omitted.
std::string failed_faces_csv(const Mesh& mesh,
                             const std::vector<FaceState>& states);

}  // namespace czdg
