#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "czdg/cohesive.hpp"
#include "czdg/material.hpp"
#include "czdg/mesh.hpp"
#include "czdg/solver.hpp"

namespace czdg {

// Mesh source: a mesh file, or a generated rectangle with optional circular
// inclusions and an initial crack segment.
struct MeshSpec {
    std::string file;  // empty means generated

    double width = 0.0;
    double height = 0.0;
    int nx = 0;
    int ny = 0;
    bool crossed = true;

    struct Inclusion {
        double cx = 0.0;
        double cy = 0.0;
        double radius = 0.0;
        int tag = 0;
    };
    std::vector<Inclusion> inclusions;  // in key order inclusion.1, .2, ...

    std::optional<CrackSegment> crack;
    double crack_tol = 1e-8;

    bool generated() const { return file.empty(); }
};

// One boundary condition. Prescribed components are either a constant or the
// load parameter (the `delta` token in config files).
struct BcSpec {
    enum class Type { Clamped, Prescribed, Traction, Free };

    struct Component {
        double value = 0.0;
        bool is_delta = false;
    };

    Type type = Type::Free;
    Component ux, uy;  // prescribed
    double tx = 0.0;   // traction
    double ty = 0.0;
};

struct ScheduleSpec {
    double delta_max = 0.0;
    int steps = 0;
    NonlinearSettings settings;
};

struct OutputSpec {
    // Boundary tag whose reaction force goes to steps.csv; -1 picks the
    // prescribed condition that carries the load parameter, if unique.
    int reaction_tag = -1;
    // Field files every N committed steps (0 disables them).
    int fields_every = 1;
};

// A full problem description as read from a config file. The mesh itself is
// not loaded yet; build_scenario turns this into runnable objects.
struct Scenario {
    MeshSpec mesh;
    std::map<int, IsotropicElastic> materials;  // region tag -> material
    double gamma0 = 10.0;
    bool cohesive_enabled = false;
    CohesiveParams cohesive{{1.0, 1.0}, {1.0, 1.0}};  // sentinel when disabled
    std::map<int, BcSpec> bcs;  // boundary tag -> condition
    ScheduleSpec schedule;
    OutputSpec output;
};

bool operator==(const MeshSpec::Inclusion& a, const MeshSpec::Inclusion& b);
bool operator==(const MeshSpec& a, const MeshSpec& b);
bool operator==(const BcSpec& a, const BcSpec& b);
bool operator==(const ScheduleSpec& a, const ScheduleSpec& b);
bool operator==(const OutputSpec& a, const OutputSpec& b);
bool operator==(const Scenario& a, const Scenario& b);

// Parses `key = value` text with sections [mesh] [material.<tag>] [cohesive]
// [bc.<tag>] [schedule] [output]. Unknown sections or keys, duplicate keys,
// malformed values, and inconsistent combinations are ConfigErrors carrying
// the line number where known. parse_config(print_config(s)) == s.
Scenario parse_config(const std::string& text);
std::string print_config(const Scenario& scenario);

// Shortest decimal form that parses back to exactly the same double.
std::string format_number(double value);

}  // namespace czdg
