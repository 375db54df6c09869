#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "pwmb/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config;
    std::string bundle, pp_dir, out, solver, active;
    long long seed = -1;
    int threads = 0;
};

pwmb::PipelineConfig build_config(const CliOverrides& o) {
    pwmb::PipelineConfig cfg;
    if (!o.config.empty()) cfg = pwmb::load_config(o.config);
    if (!o.bundle.empty()) pwmb::set_config_value(cfg, "bundle", o.bundle);
    if (!o.pp_dir.empty()) pwmb::set_config_value(cfg, "pp_dir", o.pp_dir);
    if (!o.out.empty()) pwmb::set_config_value(cfg, "out", o.out);
    if (!o.solver.empty()) pwmb::set_config_value(cfg, "solver", o.solver);
    if (!o.active.empty()) pwmb::set_config_value(cfg, "active", o.active);
    if (o.seed >= 0) pwmb::set_config_value(cfg, "seed", std::to_string(o.seed));
    if (o.threads > 0) cfg.threads = o.threads;
    if (cfg.bundle.empty()) throw pwmb::InputError("no bundle path given");
    return cfg;
}

void add_common_flags(CLI::App* app, CliOverrides& o) {
    app->add_option("--config", o.config, "config file (key = value lines)");
    app->add_option("--bundle", o.bundle, "wavefunction bundle directory");
    app->add_option("--pp-dir", o.pp_dir, "pseudopotential directory");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--solver", o.solver, "ed | vqe");
    app->add_option("--active", o.active, "explicit active orbital list, e.g. 2,3,4");
    app->add_option("--seed", o.seed, "RNG seed for the VQE start point");
    app->add_option("--threads", o.threads, "worker thread cap");
}

void inspect(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::is_directory(path)) {
        auto [cell, orb] = pwmb::load_wavefunction_bundle(path);
        std::printf("wavefunction bundle: %s\n", path.c_str());
        std::printf("  e_cut          %.6f Ha\n", orb.e_cut);
        std::printf("  electrons      %d\n", orb.n_electrons);
        std::printf("  orbitals       %d\n", orb.n_orbitals());
        std::printf("  G-vectors      %d\n", orb.n_gvecs());
        std::printf("  cell volume    %.6f Bohr^3\n", cell.volume());
        std::printf("  atoms          %zu\n", cell.atoms.size());
        for (std::size_t i = 0; i < cell.atoms.size(); ++i) {
            const auto& a = cell.atoms[i];
            std::printf("    %zu %-4s (%.4f, %.4f, %.4f) %s\n", i, a.species.c_str(),
                        a.position.x, a.position.y, a.position.z, a.upf.c_str());
        }
        std::printf("  orbital energies (Ha):");
        for (double e : orb.orbital_energies) std::printf(" %.6f", e);
        std::printf("\n");
    } else {
        const auto pp = pwmb::load_pseudopotential(path);
        std::printf("pseudopotential: %s\n", path.c_str());
        std::printf("  element        %s\n", pp.element.c_str());
        std::printf("  z_valence      %.4f\n", pp.z_valence);
        std::printf("  mesh points    %zu (r_max %.3f Bohr)\n", pp.r_grid.size(),
                    pp.r_grid.back());
        std::printf("  projectors     %zu (max l %d)\n", pp.projectors.size(),
                    pp.max_l());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic active-space solver and Bader charge analysis"};
    app.require_subcommand(1);

    CliOverrides o;
    auto* cmd_run = app.add_subcommand("run", "full pipeline: hamiltonian, solve, bader");
    auto* cmd_ham = app.add_subcommand("hamiltonian", "build the active-space Hamiltonian");
    auto* cmd_solve = app.add_subcommand("solve", "solve a previously built Hamiltonian");
    auto* cmd_bader = app.add_subcommand("bader", "density and Bader charges from a solve");
    for (auto* c : {cmd_run, cmd_ham, cmd_solve, cmd_bader}) add_common_flags(c, o);

    std::string inspect_path;
    auto* cmd_inspect = app.add_subcommand("inspect", "summarize a bundle or UPF file");
    cmd_inspect->add_option("path", inspect_path, "bundle directory or UPF file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_inspect->parsed()) {
            inspect(inspect_path);
        } else if (cmd_run->parsed()) {
            pwmb::run_pipeline(build_config(o));
        } else if (cmd_ham->parsed()) {
            pwmb::stage_hamiltonian(build_config(o));
        } else if (cmd_solve->parsed()) {
            pwmb::stage_solve(build_config(o));
        } else if (cmd_bader->parsed()) {
            pwmb::stage_bader(build_config(o));
        }
    } catch (const pwmb::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const pwmb::NumericalError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
