#include "czdg/scenario.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace czdg {

namespace {

bool is_dirichlet(const BcSpec& bc) {
    return bc.type == BcSpec::Type::Clamped ||
           bc.type == BcSpec::Type::Prescribed;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open mesh file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string resolve(const std::string& file, const std::string& base_dir) {
    if (base_dir.empty() || file.front() == '/') return file;
    return base_dir + "/" + file;
}

Mesh build_mesh(const MeshSpec& spec, const BoundaryKindMap& kinds,
                const std::map<int, BcSpec>& bcs,
                const std::string& base_dir) {
    std::set<int> edge_tags;
    Mesh mesh;
    if (spec.generated()) {
        std::vector<RegionRule> rules;
        for (const MeshSpec::Inclusion& inc : spec.inclusions)
            rules.push_back(circle_region(inc.cx, inc.cy, inc.radius,
                                          inc.tag));
        for (int tag : {rect_tags::bottom, rect_tags::top, rect_tags::left,
                        rect_tags::right})
            edge_tags.insert(tag);
        for (const auto& [tag, bc] : bcs)
            if (!edge_tags.count(tag))
                throw ConfigError("[bc." + std::to_string(tag) +
                                  "] does not match a side of the generated "
                                  "rectangle (tags 1..4)");
        for (int tag : edge_tags)
            if (!bcs.count(tag))
                throw ConfigError("boundary tag " + std::to_string(tag) +
                                  " has no [bc." + std::to_string(tag) +
                                  "] section");
        mesh = generate_rect(spec.width, spec.height, spec.nx, spec.ny,
                             rules, spec.crossed, kinds);
    } else {
        MeshData data = parse_mesh(read_file(resolve(spec.file, base_dir)));
        for (const BoundaryEdge& e : data.boundary_edges)
            edge_tags.insert(e.tag);
        for (const auto& [tag, bc] : bcs)
            if (!edge_tags.count(tag))
                throw ConfigError("[bc." + std::to_string(tag) +
                                  "] does not match any boundary tag of '" +
                                  spec.file + "'");
        for (int tag : edge_tags)
            if (!bcs.count(tag))
                throw ConfigError("boundary tag " + std::to_string(tag) +
                                  " has no [bc." + std::to_string(tag) +
                                  "] section");
        mesh = build_faces(data, kinds);
    }
    return mesh;
}

// The unique displacement-controlled side, used when [output] reaction = -1.
int resolve_reaction(const std::map<int, BcSpec>& bcs, int requested) {
    if (requested >= 0) {
        auto it = bcs.find(requested);
        if (it == bcs.end() || !is_dirichlet(it->second))
            throw ConfigError("reaction tag " + std::to_string(requested) +
                              " is not a clamped or prescribed boundary");
        return requested;
    }
    int found = -1;
    for (const auto& [tag, bc] : bcs) {
        if (bc.type != BcSpec::Type::Prescribed) continue;
        if (!bc.ux.is_delta && !bc.uy.is_delta) continue;
        if (found >= 0)
            throw ConfigError(
                "several boundaries are displacement-controlled; set "
                "[output] reaction to pick one");
        found = tag;
    }
    if (found < 0)
        throw ConfigError(
            "no prescribed boundary uses delta; set [output] reaction");
    return found;
}

int reaction_component_of(const BcSpec& bc) {
    if (bc.type == BcSpec::Type::Prescribed && bc.ux.is_delta &&
        !bc.uy.is_delta)
        return 0;
    return 1;
}

}  // namespace

BoundaryData BuiltScenario::boundary_at(double delta) const {
    BoundaryData bd;
    for (const auto& [tag, bc] : bcs) {
        switch (bc.type) {
            case BcSpec::Type::Clamped:
                bd.dirichlet[tag] = [](const Vec2&) -> Vec2 {
                    return Vec2::Zero();
                };
                break;
            case BcSpec::Type::Prescribed: {
                Vec2 value(bc.ux.is_delta ? delta : bc.ux.value,
                           bc.uy.is_delta ? delta : bc.uy.value);
                bd.dirichlet[tag] = [value](const Vec2&) { return value; };
                break;
            }
            case BcSpec::Type::Traction: {
                Vec2 t(bc.tx, bc.ty);
                bd.neumann[tag] = [t](const Vec2&) { return t; };
                break;
            }
            case BcSpec::Type::Free:
                bd.neumann[tag] = [](const Vec2&) -> Vec2 {
                    return Vec2::Zero();
                };
                break;
        }
    }
    return bd;
}

BuiltScenario build_scenario(const Scenario& scenario,
                             const std::string& base_dir) {
    BuiltScenario built;
    built.bcs = scenario.bcs;

    BoundaryKindMap kinds;
    for (const auto& [tag, bc] : scenario.bcs)
        kinds[tag] = is_dirichlet(bc) ? FaceKind::Dirichlet
                                      : FaceKind::Neumann;
    built.mesh = build_mesh(scenario.mesh, kinds, scenario.bcs, base_dir);

    for (const auto& [tag, mat] : scenario.materials)
        built.materials.set(tag, mat);
    built.materials.validate_covers(built.mesh);

    built.gamma0 = scenario.gamma0;
    if (scenario.cohesive_enabled) {
        built.cohesive = scenario.cohesive;
    } else {
        double inf = std::numeric_limits<double>::infinity();
        built.cohesive = CohesiveParams{{inf, 1.0}, {inf, 1.0}};
    }
    built.cohesive.validate();

    if (scenario.mesh.crack)
        built.initial_crack = mark_initial_crack(
            built.mesh, *scenario.mesh.crack, scenario.mesh.crack_tol);

    built.schedule = LoadSchedule::uniform(scenario.schedule.delta_max,
                                           scenario.schedule.steps);
    built.settings = scenario.schedule.settings;

    built.reaction_tag =
        resolve_reaction(scenario.bcs, scenario.output.reaction_tag);
    built.reaction_component =
        reaction_component_of(scenario.bcs.at(built.reaction_tag));
    built.fields_every = scenario.output.fields_every;
    return built;
}

}  // namespace czdg
