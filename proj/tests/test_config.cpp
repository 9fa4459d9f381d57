#include "czdg/config.hpp"
#include "doctest.h"

#include <cstdlib>
#include <string>

using namespace czdg;

namespace {

const char* kSenConfig = R"(# edge notch, soft matrix, two stiff inclusions
[mesh]
width = 1.0
height = 2.0
nx = 25
ny = 50
pattern = crossed
inclusion.1 = 0.75 1.0 0.1 7
inclusion.2 = 0.45 1.1 0.1 7
crack = 0.40 0.90 0.2 33
crack_tol = 1e-8

[material.0]
E = 10
nu = 0.45

[material.7]
E = 1000
nu = 0.45

[cohesive]
gamma0 = 10
sigma_max_n = 1
u_nc = 0.02
sigma_max_t = 1
u_tc = 0.02

[bc.1]
type = clamped

[bc.2]
type = prescribed
ux = 0
uy = delta

[bc.3]
type = free

[bc.4]
type = traction
tx = 0
ty = -0.5

[schedule]
delta_max = 0.05
steps = 50

[output]
reaction = 2
fields_every = 5
)";

const char* kElasticConfig = R"([mesh]
width = 1
height = 1
nx = 2
ny = 2

[material.0]
E = 1
nu = 0.3

[bc.1]
type = clamped

[bc.2]
type = prescribed
ux = 0
uy = delta

[bc.3]
type = free

[bc.4]
type = free

[schedule]
delta_max = 0.01
steps = 1
)";

std::string with_mesh(const std::string& mesh_block) {
    return "[mesh]\n" + mesh_block + R"(
[material.0]
E = 1
nu = 0.3

[bc.1]
type = clamped

[schedule]
delta_max = 0.01
steps = 1
)";
}

std::string parse_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("full scenario parses") {
    Scenario s = parse_config(kSenConfig);
    CHECK(s.mesh.generated());
    CHECK(s.mesh.width == 1.0);
    CHECK(s.mesh.height == 2.0);
    CHECK(s.mesh.nx == 25);
    CHECK(s.mesh.ny == 50);
    CHECK(s.mesh.crossed);
    REQUIRE(s.mesh.inclusions.size() == 2);
    CHECK(s.mesh.inclusions[0].cx == 0.75);
    CHECK(s.mesh.inclusions[1].cy == 1.1);
    CHECK(s.mesh.inclusions[1].tag == 7);
    REQUIRE(s.mesh.crack.has_value());
    CHECK(s.mesh.crack->center.x() == 0.40);
    CHECK(s.mesh.crack->length == 0.2);
    CHECK(s.mesh.crack->angle_deg == 33.0);
    CHECK(s.mesh.crack_tol == 1e-8);

    CHECK(s.materials.size() == 2);
    CHECK(s.materials.at(0).E == 10.0);
    CHECK(s.materials.at(7).E == 1000.0);
    CHECK(s.materials.at(7).nu == 0.45);

    CHECK(s.gamma0 == 10.0);
    CHECK(s.cohesive_enabled);
    CHECK(s.cohesive.normal.sigma_max == 1.0);
    CHECK(s.cohesive.normal.u_c == 0.02);
    CHECK(s.cohesive.tangential.u_c == 0.02);

    CHECK(s.bcs.size() == 4);
    CHECK(s.bcs.at(1).type == BcSpec::Type::Clamped);
    CHECK(s.bcs.at(2).type == BcSpec::Type::Prescribed);
    CHECK_FALSE(s.bcs.at(2).ux.is_delta);
    CHECK(s.bcs.at(2).ux.value == 0.0);
    CHECK(s.bcs.at(2).uy.is_delta);
    CHECK(s.bcs.at(3).type == BcSpec::Type::Free);
    CHECK(s.bcs.at(4).type == BcSpec::Type::Traction);
    CHECK(s.bcs.at(4).ty == -0.5);

    CHECK(s.schedule.delta_max == 0.05);
    CHECK(s.schedule.steps == 50);
    CHECK(s.schedule.settings.max_iter == 50);
    CHECK(s.schedule.settings.tol_rel == 1e-6);

    CHECK(s.output.reaction_tag == 2);
    CHECK(s.output.fields_every == 5);
}

TEST_CASE("round trip is the identity") {
    Scenario s = parse_config(kSenConfig);
    std::string printed = print_config(s);
    Scenario again = parse_config(printed);
    CHECK(again == s);
    CHECK(print_config(again) == printed);
}

TEST_CASE("elastic config defaults") {
    Scenario s = parse_config(kElasticConfig);
    CHECK_FALSE(s.cohesive_enabled);
    CHECK(s.gamma0 == 10.0);
    CHECK_FALSE(s.mesh.crack.has_value());
    CHECK(s.mesh.crossed);
    CHECK(s.output.reaction_tag == -1);
    CHECK(s.output.fields_every == 1);
    CHECK(s.schedule.settings.relaxation == 0.5);
    CHECK(s.schedule.settings.max_bisect == 5);
    CHECK(s.schedule.settings.initiation_seed == 0.01);
    CHECK(parse_config(print_config(s)) == s);
}

TEST_CASE("mesh from file") {
    Scenario s = parse_config(with_mesh("file = meshes/plate.txt\n"));
    CHECK_FALSE(s.mesh.generated());
    CHECK(s.mesh.file == "meshes/plate.txt");
    CHECK(parse_config(print_config(s)) == s);

    Scenario cracked =
        parse_config(with_mesh("file = plate.txt\ncrack = 0.5 0.5 0.2 0\n"));
    REQUIRE(cracked.mesh.crack.has_value());
    CHECK(parse_config(print_config(cracked)) == cracked);

    CHECK(contains(parse_error(with_mesh("file = plate.txt\nwidth = 1\n")),
                   "'width' does not apply to a mesh file"));
    CHECK(contains(
        parse_error(with_mesh("file = plate.txt\ninclusion.1 = 0 0 1 2\n")),
        "inclusions do not apply to a mesh file"));
}

TEST_CASE("errors carry line numbers") {
    std::string msg =
        parse_error(with_mesh("width = 1\nheight = 1\nnx = two\nny = 2\n"));
    CHECK(contains(msg, "line 4"));
    CHECK(contains(msg, "nx"));

    msg = parse_error(with_mesh("width = 1\nheight = -3\nnx = 2\nny = 2\n"));
    CHECK(contains(msg, "line 3"));
    CHECK(contains(msg, "height must be positive"));

    msg = parse_error("width = 1\n");
    CHECK(contains(msg, "line 1"));
    CHECK(contains(msg, "outside of any section"));

    msg = parse_error("[mesh]\nwidth\n");
    CHECK(contains(msg, "line 2"));
    CHECK(contains(msg, "key = value"));
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK(contains(
        parse_error(with_mesh("width = 1\nheight = 1\nnx = 2\nny = 2\nq = 3\n")),
        "unknown key 'q' in [mesh]"));
    CHECK(contains(parse_error(std::string(kElasticConfig) + "[sched]\nx = 1\n"),
                   "unknown section [sched]"));
    CHECK(contains(parse_error(std::string(kElasticConfig) + "[material.a]\n"),
                   "integer tag"));
}

TEST_CASE("duplicates are rejected") {
    CHECK(contains(
        parse_error(with_mesh("width = 1\nwidth = 2\nheight = 1\nnx = 2\nny = 2\n")),
        "duplicate key 'width'"));
    CHECK(contains(parse_error(std::string(kElasticConfig) + "[mesh]\n"),
                   "duplicate section [mesh]"));
    CHECK(contains(parse_error(std::string(kElasticConfig) + "[bc.1]\ntype = free\n"),
                   "duplicate section [bc.1]"));
}

TEST_CASE("cohesive group validation") {
    CHECK(contains(
        parse_error(std::string(kElasticConfig) + "[cohesive]\ngamma0 = 0\n"),
        "gamma0 must be positive"));
    CHECK(contains(
        parse_error(std::string(kElasticConfig) +
                    "[cohesive]\nsigma_max_n = 1\n"),
        "come as a group"));
    CHECK(contains(
        parse_error(std::string(kElasticConfig) +
                    "[cohesive]\nsigma_max_n = 1\nu_nc = 0.02\n"
                    "sigma_max_t = 1\nu_tc = 0\n"),
        "u_tc must be positive"));
}

TEST_CASE("boundary condition validation") {
    CHECK(contains(
        parse_error(std::string(kElasticConfig) + "[bc.5]\ntype = sliding\n"),
        "type must be clamped, prescribed, traction, or free"));
    CHECK(contains(
        parse_error(std::string(kElasticConfig) +
                    "[bc.5]\ntype = prescribed\nux = 0\n"),
        "missing required key 'uy'"));
    CHECK(contains(
        parse_error(std::string(kElasticConfig) +
                    "[bc.5]\ntype = traction\ntx = 0\nty = 0\nux = 1\n"),
        "unknown key 'ux' in [bc.5]"));
    CHECK(contains(
        parse_error(std::string(kElasticConfig) + "[bc.5]\ntype = free\nuy = delta\n"),
        "unknown key 'uy' in [bc.5]"));
}

TEST_CASE("schedule validation") {
    CHECK(contains(
        parse_error(with_mesh("width = 1\nheight = 1\nnx = 2\nny = 2\n") +
                    "[schedule]\n"),
        "duplicate section [schedule]"));
    std::string base = R"([mesh]
width = 1
height = 1
nx = 2
ny = 2

[material.0]
E = 1
nu = 0.3

[bc.1]
type = clamped

[schedule]
)";
    CHECK(contains(parse_error(base + "delta_max = -1\nsteps = 5\n"),
                   "delta_max must be positive"));
    CHECK(contains(parse_error(base + "delta_max = 1\nsteps = 0\n"),
                   "steps must be at least 1"));
    CHECK(contains(parse_error(base + "delta_max = 1\nsteps = 5\nrelaxation = 1.5\n"),
                   "relaxation must be in (0, 1]"));
    CHECK(contains(parse_error(base + "delta_max = 1\n"),
                   "missing required key 'steps'"));
}

TEST_CASE("missing sections are reported") {
    CHECK(contains(parse_error("[schedule]\ndelta_max = 1\nsteps = 1\n"),
                   "missing required section [mesh]"));
    std::string no_schedule = R"([mesh]
width = 1
height = 1
nx = 2
ny = 2

[material.0]
E = 1
nu = 0.3

[bc.1]
type = clamped
)";
    CHECK(contains(parse_error(no_schedule),
                   "missing required section [schedule]"));
}

TEST_CASE("number formatting round trips") {
    const double values[] = {0.1,    1e-8,       33.0, 0.3333333333333333,
                             -2.5e3, 1234567.875, 0.02, 6.25e-3};
    for (double v : values) {
        std::string str = format_number(v);
        CHECK(std::strtod(str.c_str(), nullptr) == v);
    }
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(0.02) == "0.02");
    CHECK(format_number(-0.5) == "-0.5");
}
