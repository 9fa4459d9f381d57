#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "czdg/config.hpp"
#include "czdg/mesh.hpp"
#include "czdg/run.hpp"
#include "czdg/verify.hpp"

namespace {

czdg::RegionRule parse_inclusion(const std::string& text) {
    double cx, cy, radius;
    int tag;
    char trailing;
    if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%d%c", &cx, &cy, &radius, &tag,
                    &trailing) != 4)
        throw CLI::ValidationError(
            "--inclusion", "expected cx,cy,radius,tag, got '" + text + "'");
    if (radius <= 0.0)
        throw CLI::ValidationError("--inclusion", "radius must be positive");
    if (tag <= 0)
        throw CLI::ValidationError("--inclusion",
                                   "tag must be positive (0 is the background)");
    return czdg::circle_region(cx, cy, radius, tag);
}

int cmd_mesh_gen(const std::string& out_path, double width, double height,
                 int nx, int ny, bool plain,
                 const std::vector<std::string>& inclusions) {
    std::vector<czdg::RegionRule> rules;
    for (const auto& inc : inclusions) rules.push_back(parse_inclusion(inc));

    czdg::Mesh mesh = czdg::generate_rect(width, height, nx, ny, rules, !plain);
    std::ofstream out(out_path, std::ios::binary);
    out << czdg::write_mesh(mesh);
    if (!out) {
        std::cerr << "czdg: error: cannot write '" << out_path << "'\n";
        return 1;
    }
    std::cout << out_path << ": " << mesh.nodes.size() << " nodes, "
              << mesh.triangles.size() << " triangles\n";
    return 0;
}

int cmd_mesh_info(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        std::cerr << "czdg: error: cannot open mesh file '" << path << "'\n";
        return 1;
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    czdg::Mesh mesh = czdg::read_mesh(text);

    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& n : mesh.nodes) {
        xmin = std::min(xmin, n.x);
        xmax = std::max(xmax, n.x);
        ymin = std::min(ymin, n.y);
        ymax = std::max(ymax, n.y);
    }

    auto join = [](const std::set<int>& s) {
        std::string out;
        for (int v : s) out += (out.empty() ? "" : " ") + std::to_string(v);
        return out;
    };

    std::cout << "nodes: " << mesh.nodes.size() << "\n"
              << "triangles: " << mesh.triangles.size() << "\n"
              << "interior faces: " << mesh.count_faces(czdg::FaceKind::Interior)
              << "\n"
              << "boundary edges: " << mesh.boundary_edges.size() << "\n"
              << "region tags: " << join(mesh.region_tags()) << "\n"
              << "boundary tags: " << join(mesh.boundary_tags()) << "\n"
              << "bounding box: [" << czdg::format_number(xmin) << ", "
              << czdg::format_number(xmax) << "] x ["
              << czdg::format_number(ymin) << ", " << czdg::format_number(ymax)
              << "]\n";
    return 0;
}

int cmd_verify(const std::string& suite) {
    std::vector<std::string> suites;
    if (suite == "all")
        suites = czdg::verify_suites();
    else
        suites.push_back(suite);

    bool ok = true;
    for (const auto& name : suites) {
        czdg::VerifyReport report = czdg::run_verify_suite(name);
        std::cout << czdg::format_report(report);
        ok = ok && report.all_passed();
    }
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-static crack growth along element faces of a "
                 "triangular mesh, with a cohesive law on every interface"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "czdg 0.1.0");

    std::string config_path;
    std::string out_dir = "out";
    auto* run = app.add_subcommand("run", "Run a simulation from a config file");
    run->add_option("config", config_path, "Path to the config file")
        ->required();
    run->add_option("--out", out_dir, "Output directory")
        ->capture_default_str();

    auto* mesh = app.add_subcommand("mesh", "Generate or inspect mesh files");
    mesh->require_subcommand(1);

    std::string gen_path;
    double width = 1.0, height = 1.0;
    int nx = 10, ny = 10;
    bool plain = false;
    std::vector<std::string> inclusions;
    auto* gen = mesh->add_subcommand("gen", "Write a structured rectangle mesh");
    gen->add_option("file", gen_path, "Output mesh file")->required();
    gen->add_option("--width", width, "Domain width [mm]")
        ->capture_default_str();
    gen->add_option("--height", height, "Domain height [mm]")
        ->capture_default_str();
    gen->add_option("--nx", nx, "Cells along x")->capture_default_str();
    gen->add_option("--ny", ny, "Cells along y")->capture_default_str();
    gen->add_flag("--plain", plain,
                  "Two triangles per cell instead of the crossed pattern");
    gen->add_option("--inclusion", inclusions,
                    "Circular region as cx,cy,radius,tag (repeatable)");

    std::string info_path;
    auto* info = mesh->add_subcommand("info", "Print mesh statistics");
    info->add_option("file", info_path, "Mesh file")->required();

    std::string suite;
    auto* verify = app.add_subcommand(
        "verify", "Run a built-in verification suite and report pass/fail");
    verify
        ->add_option("suite", suite,
                     "patch, convergence, limits, cohesive-grad, or all")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return czdg::run_simulation(config_path, out_dir);
        if (gen->parsed())
            return cmd_mesh_gen(gen_path, width, height, nx, ny, plain,
                                inclusions);
        if (info->parsed()) return cmd_mesh_info(info_path);
        if (verify->parsed()) return cmd_verify(suite);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "czdg: error: " << e.what() << "\n";
        return 1;
    } catch (const czdg::Error& e) {
        std::cerr << "czdg: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
