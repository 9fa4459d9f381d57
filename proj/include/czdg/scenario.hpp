#pragma once

#include <string>
#include <vector>

#include "czdg/config.hpp"
#include "czdg/dg_core.hpp"

namespace czdg {

// A scenario instantiated into concrete objects: mesh generated or loaded,
// materials matched against the region tags, load schedule expanded.
struct BuiltScenario {
    Mesh mesh;
    MaterialField materials;
    double gamma0 = 10.0;
    CohesiveParams cohesive{{1.0, 1.0}, {1.0, 1.0}};
    std::vector<int> initial_crack;  // face ids failed before any loading
    LoadSchedule schedule;
    NonlinearSettings settings;
    std::map<int, BcSpec> bcs;
    int reaction_tag = -1;
    int reaction_component = 1;  // 0 reports the x reaction, 1 the y
    int fields_every = 1;

    // Boundary data for one value of the load parameter. Prescribed
    // components marked `delta` take that value, everything else is fixed.
    BoundaryData boundary_at(double delta) const;
};

// Checks the cross-section constraints a parse cannot see: boundary
// condition tags must match the mesh boundary tags exactly, every region
// tag needs a material, the reaction tag must name a displacement-controlled
// side. A mesh file path is resolved relative to base_dir.
//
// A config without cohesive strengths gets unbreakable interfaces, so the
// run reduces to the continuous elastic problem.
BuiltScenario build_scenario(const Scenario& scenario,
                             const std::string& base_dir = "");

}  // namespace czdg
