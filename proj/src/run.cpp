#include "czdg/run.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "czdg/output.hpp"
#include "czdg/scenario.hpp"
#include "czdg/solver.hpp"

namespace czdg {

namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw Error("cannot write '" + path.string() + "'");
}

std::string step_id(int step) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d", step);
    return buf;
}

void write_fields(const fs::path& dir, int step, const Assembler& assembler,
                  const MaterialField& materials, const QuasiStatic& solver) {
    std::string id = step_id(step);
    write_file(dir / ("step_" + id + ".vtk"),
               vtk_fields(assembler, materials, solver.solution()));
    write_file(dir / ("failed_faces_" + id + ".csv"),
               failed_faces_csv(assembler.mesh(), solver.states()));
}

std::string summary_text(const BuiltScenario& built,
                         const std::vector<StepRow>& rows, bool aborted,
                         const QuasiStatic& solver) {
    std::string out;
    out += "steps_completed: " + std::to_string(rows.size()) + " of " +
           std::to_string(built.schedule.deltas.size()) + "\n";
    out += std::string("aborted: ") + (aborted ? "yes" : "no") + "\n";
    double delta = rows.empty() ? 0.0 : rows.back().delta;
    double reaction = rows.empty() ? 0.0 : rows.back().reaction;
    out += "final_delta_mm: " + format_number(delta) + "\n";
    out += "final_reaction_N_per_mm: " + format_number(reaction) + "\n";
    out += "failed_faces: " + std::to_string(solver.failed_faces().size()) +
           "\n";
    out += "dissipated_energy_N: " + format_number(solver.dissipated_total()) +
           "\n";
    out += "elastic_energy_N: " + format_number(solver.elastic_energy()) +
           "\n";
    return out;
}

}  // namespace

int run_simulation(const std::string& config_path,
                   const std::string& out_dir) {
    BuiltScenario built;
    try {
        std::string text = read_file(config_path);
        std::string base = fs::path(config_path).parent_path().string();
        built = build_scenario(parse_config(text), base);
    } catch (const Error& e) {
        std::cerr << "czdg: error: " << e.what() << "\n";
        return 1;
    }

    try {
        fs::path dir(out_dir);
        fs::create_directories(dir);

        Assembler assembler(built.mesh, built.materials, built.gamma0);
        QuasiStatic solver(
            assembler, built.cohesive,
            [&built](double d) { return built.boundary_at(d); },
            built.settings);
        solver.prefail(built.initial_crack);

        std::vector<StepRow> rows;
        bool aborted = false;
        int committed = 0;
        int last_written = -1;
        if (built.fields_every > 0) {
            write_fields(dir, 0, assembler, built.materials, solver);
            last_written = 0;
        }

        for (std::size_t i = 0; i < built.schedule.deltas.size(); ++i) {
            int step = static_cast<int>(i) + 1;
            StepResult res;
            try {
                res = solver.step(built.schedule.deltas[i],
                                  built.reaction_tag);
            } catch (const SolveError& e) {
                std::cerr << "czdg: step " << step << ": " << e.what()
                          << "\n";
                aborted = true;
                break;
            }
            StepRow row;
            row.step = step;
            row.delta = res.delta;
            row.reaction = res.reaction[built.reaction_component];
            row.failed_faces = static_cast<int>(res.failed_faces.size());
            row.iterations = res.iterations;
            row.converged = res.converged;
            rows.push_back(row);
            if (!res.converged) {
                std::cerr << "czdg: step " << step
                          << " did not converge, stopping\n";
                aborted = true;
                break;
            }
            committed = step;
            if (built.fields_every > 0 && step % built.fields_every == 0) {
                write_fields(dir, step, assembler, built.materials, solver);
                last_written = step;
            }
        }
        // The solver state sits at the last committed step; make sure that
        // state is on disk even when the schedule stopped between writes.
        if (built.fields_every > 0 && committed > 0 &&
            last_written != committed)
            write_fields(dir, committed, assembler, built.materials, solver);

        write_file(dir / "steps.csv", steps_csv(rows));
        write_file(dir / "summary.txt",
                   summary_text(built, rows, aborted, solver));
        return aborted ? 2 : 0;
    } catch (const Error& e) {
        std::cerr << "czdg: error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace czdg
