// ipmuq command-line driver.
//
// Exit codes: 0 success, 1 other failure, 2 configuration or parse error,
// 3 non-convergence, 4 ill-conditioned dual Hessian, 5 admissibility failure,
// 6 incompatible snapshot.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ipmuq/harness/config.hpp"
#include "ipmuq/harness/moment_io.hpp"
#include "ipmuq/harness/runner.hpp"

namespace fs = std::filesystem;
using namespace ipmuq;
using namespace ipmuq::harness;

namespace {

enum ExitCode { ok = 0, failure = 1, config_error = 2, non_convergence = 3, ill_conditioned = 4, inadmissible = 5, incompatible = 6 };

struct Source {
    std::string config;
    std::string preset;
    int workers = 0;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

/// Preset first, then the config file patched over it.
ExperimentConfig resolve(const Source& src) {
    if (src.config.empty() && src.preset.empty()) throw ConfigError("give --config, --preset or both");
    json j = src.preset.empty() ? json::object() : preset_config(src.preset);
    if (!src.config.empty()) j.merge_patch(load_json(src.config));
    ExperimentConfig c = parse_config(j);
    if (src.workers > 0) c.workers = src.workers;
    return c;
}

void add_source(CLI::App* cmd, Source& src) {
    cmd->add_option("--config", src.config, "JSON experiment configuration");
    cmd->add_option("--preset", src.preset, "Named preset: burgers-shock, sod1d, naca1d, euler2d-uq2, shocktube3d");
    cmd->add_option("--workers", src.workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
}

std::string output_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return ok;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return config_error;
    } catch (const NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << " (iterations " << e.iterations << ", last value " << e.last_value << ")\n";
        return non_convergence;
    } catch (const IllConditionedHessian& e) {
        std::cerr << "ill-conditioned Hessian: " << e.what() << "\n";
        return ill_conditioned;
    } catch (const AdmissibilityError& e) {
        std::cerr << "admissibility failure: " << e.what() << "\n";
        return inadmissible;
    } catch (const InadmissibleDual& e) {
        std::cerr << "admissibility failure: " << e.what() << "\n";
        return inadmissible;
    } catch (const IncompatibleSnapshot& e) {
        std::cerr << "incompatible snapshot: " << e.what() << "\n";
        return incompatible;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrusive and non-intrusive uncertainty quantification for hyperbolic conservation laws"};
    app.require_subcommand(1);

    Source run_src;
    std::string run_output, run_ref_path;
    auto* run = app.add_subcommand("run", "Run an experiment; writes a moment snapshot and a per-iteration CSV");
    add_source(run, run_src);
    run->add_option("--output", run_output, "Output directory (default: output.dir of the config)");
    run->add_option("--reference", run_ref_path, "Reference snapshot; adds error columns to the CSV");

    Source ref_src;
    std::string ref_output = ".";
    std::string ref_name = "reference.txt";
    auto* reference = app.add_subcommand("reference", "Dense Gauss-Legendre collocation reference");
    add_source(reference, ref_src);
    reference->add_option("--output", ref_output, "Output directory");
    reference->add_option("--name", ref_name, "Snapshot file name");

    Source cmp_src;
    std::string cmp_result, cmp_reference;
    auto* compare = app.add_subcommand("compare", "Relative L2 errors of E and Var between two snapshots");
    add_source(compare, cmp_src);
    compare->add_option("result", cmp_result, "Snapshot to assess")->required();
    compare->add_option("--reference", cmp_reference, "Reference snapshot")->required();

    std::string mesh_spec, mesh_preset, mesh_output;
    auto* mesh_gen = app.add_subcommand("mesh-gen", "Write a rectangle or channel mesh");
    mesh_gen->add_option("--config", mesh_spec, "JSON rectangle specification (problem.mesh schema)");
    mesh_gen->add_option("--preset", mesh_preset, "Use the mesh of a 2D preset");
    mesh_gen->add_option("--output", mesh_output, "Mesh file to write")->required();

    std::string show_name;
    auto* show = app.add_subcommand("preset", "Print the configuration of a preset");
    show->add_option("name", show_name, "Preset name")->required();

    CLI11_PARSE(app, argc, argv);

    if (*run) {
        return run_guarded([&] {
            const ExperimentConfig c = resolve(run_src);
            std::optional<Snapshot> ref;
            if (!run_ref_path.empty()) ref = load_snapshot(run_ref_path);
            const RunOutput out = run_experiment(c, ref);
            const std::string dir = run_output.empty() ? c.output_dir : run_output;
            save_snapshot(output_path(dir, c.snapshot), out.snapshot);
            std::ofstream csv(output_path(dir, c.csv));
            write_history_csv(csv, out.history);
            std::cout << to_string(c.method) << ": " << out.history.size() << " rows, snapshot " << output_path(dir, c.snapshot) << "\n";
        });
    }
    if (*reference) {
        return run_guarded([&] {
            const ExperimentConfig c = resolve(ref_src);
            const std::string path = output_path(ref_output, ref_name);
            save_snapshot(path, harness::run_reference(c));
            std::cout << "reference snapshot " << path << "\n";
        });
    }
    if (*compare) {
        return run_guarded([&] {
            const ExperimentConfig c = resolve(cmp_src);
            const auto errors = compare_snapshots(c, load_snapshot(cmp_result), load_snapshot(cmp_reference));
            std::cout << "component,rel_E_error,rel_Var_error\n";
            for (std::size_t k = 0; k < errors.size(); ++k) std::printf("%zu,%.10g,%.10g\n", k, errors[k].first, errors[k].second);
        });
    }
    if (*mesh_gen) {
        return run_guarded([&] {
            json j;
            if (!mesh_preset.empty()) j = preset_config(mesh_preset);
            else if (!mesh_spec.empty()) j = json{{"method", "sc_blackbox"}, {"problem", {{"preset", "naca1d"}, {"mesh", load_json(mesh_spec)}}}};
            else throw ConfigError("give --config or --preset");
            // Only the mesh section is used; fill the rest so validation passes.
            json probe = json{{"method", "sc_blackbox"},
                              {"problem", {{"preset", "naca1d"}, {"mesh", j.at("problem").at("mesh")}}},
                              {"basis", {{"order", 1}}},
                              {"quadrature", {{"family", "gauss_legendre"}, {"level", 2}}},
                              {"solver", {{"max_steps", 1}}}};
            const ExperimentConfig c = parse_config(probe);
            const FvMesh mesh = build_mesh(c);
            save_mesh(mesh_output, mesh);
            std::cout << mesh.cells() << " triangles, " << mesh.faces.size() << " faces -> " << mesh_output << "\n";
        });
    }
    return run_guarded([&] { std::cout << preset_config(show_name).dump(2) << "\n"; });
}
