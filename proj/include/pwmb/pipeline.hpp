#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "pwmb/activespace.hpp"
#include "pwmb/density_bader.hpp"
#include "pwmb/solver.hpp"

namespace pwmb {

struct PipelineConfig {
    std::filesystem::path bundle;
    std::filesystem::path pp_dir;
    std::filesystem::path out = "out";
    std::string solver = "vqe";  // "ed" | "vqe"

    // active-space rule: explicit list wins; otherwise energy window
    std::vector<int> active;
    int max_orbitals = 11;
    double window = 5.0 * kEvToHartree;  // Hartree, around the Fermi level
    double degeneracy_tol = 1e-4;        // Hartree
    bool fermi_override = false;
    double fermi_level = 0.0;  // Hartree, used when fermi_override

    std::uint64_t seed = 0;
    double perturbation = 0.0;
    int repetitions = 1;
    int max_iterations = 2000;
    double grad_tol = 1e-8;
    int qubit_budget_orbitals = 14;

    double vacuum_threshold = 1e-6;
    std::array<int, 3> grid{0, 0, 0};  // 0 0 0 -> automatic
    int threads = 0;                   // 0 -> runtime default
};

// key = value lines, '#' comments; energy values accept eV / Ha / mHa
// suffixes and are stored in Hartree.
PipelineConfig load_config(const std::filesystem::path& path);
void set_config_value(PipelineConfig& cfg, const std::string& key,
                      const std::string& value);

// Grows whole degenerate shells nearest-first from the Fermi level (HOMO-LUMO
// midpoint) within the energy window, stopping at the orbital cap; a shell
// that would be split aborts. Frozen = occupied orbitals left out.
ActiveSpaceSpec select_active_space(const std::vector<double>& orbital_energies,
                                    int n_electrons, const PipelineConfig& cfg);

struct SolveReport {
    double energy = 0.0;
    double e_const = 0.0;
    int n_iterations = 0;
    double grad_norm = 0.0;
    std::vector<double> occupancies;
    bool converged = true;
    std::uint64_t seed = 0;
    std::string solver;
};

// Pipeline stages; `run_pipeline` composes all of them. Partial artifacts are
// removed when a stage fails.
void stage_hamiltonian(const PipelineConfig& cfg);
void stage_solve(const PipelineConfig& cfg);
void stage_bader(const PipelineConfig& cfg);
void run_pipeline(const PipelineConfig& cfg);

SolveReport load_solve_report(const std::filesystem::path& path);

}  // namespace pwmb
