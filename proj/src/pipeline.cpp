#include "pwmb/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pwmb/ewald.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pwmb {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
    for (char& c : s) c = char(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

double parse_energy(const std::string& value, const std::string& key) {
    std::istringstream in(value);
    double x;
    std::string unit;
    if (!(in >> x)) throw InputError("config: " + key + ": not a number: " + value);
    in >> unit;
    unit = lower(unit);
    if (unit.empty() || unit == "ha" || unit == "hartree") return x;
    if (unit == "ev") return x * kEvToHartree;
    if (unit == "mha") return x * 1e-3;
    if (unit == "ry") return x * kRydbergToHartree;
    throw InputError("config: " + key + ": unknown energy unit '" + unit + "'");
}

std::vector<int> parse_int_list(const std::string& value) {
    std::string s = value;
    for (char& c : s)
        if (c == ',' || c == 'x') c = ' ';
    std::istringstream in(s);
    std::vector<int> out;
    int v;
    while (in >> v) out.push_back(v);
    std::string rest;
    if (in.clear(), in >> rest)
        throw InputError("config: malformed integer list: " + value);
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void apply_thread_budget(const PipelineConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#else
    (void)cfg;
#endif
}

struct LoadedInputs {
    CrystalCell cell;
    PlaneWaveOrbitalSet orbitals;
    std::vector<NormConservingPseudopotential> pps;  // one slot per species file
    std::vector<const NormConservingPseudopotential*> per_atom;
    std::vector<double> z_valence;  // per atom
};

LoadedInputs load_inputs(const PipelineConfig& cfg) {
    LoadedInputs in;
    std::tie(in.cell, in.orbitals) = load_wavefunction_bundle(cfg.bundle);
    std::map<std::string, std::size_t> by_file;
    std::vector<std::string> files;
    for (const Atom& atom : in.cell.atoms) {
        if (!by_file.count(atom.upf)) {
            const auto path = cfg.pp_dir / atom.upf;
            if (!std::filesystem::exists(path))
                throw InputError("pseudopotential file for species " + atom.species +
                                 " not found: " + path.string());
            by_file[atom.upf] = files.size();
            files.push_back(atom.upf);
        }
    }
    in.pps.reserve(files.size());
    for (const auto& f : files) in.pps.push_back(load_pseudopotential(cfg.pp_dir / f));
    double z_total = 0.0;
    for (const Atom& atom : in.cell.atoms) {
        const auto& pp = in.pps[by_file.at(atom.upf)];
        in.per_atom.push_back(&pp);
        in.z_valence.push_back(pp.z_valence);
        z_total += pp.z_valence;
    }
    if (std::abs(z_total - in.orbitals.n_electrons) > 1e-6)
        throw InputError("total valence charge " + std::to_string(z_total) +
                         " does not match the bundle electron count " +
                         std::to_string(in.orbitals.n_electrons));
    return in;
}

ActiveSpaceSpec resolve_active(const PipelineConfig& cfg,
                               const PlaneWaveOrbitalSet& orbitals) {
    if (!cfg.active.empty()) {
        ActiveSpaceSpec spec;
        spec.active = cfg.active;
        std::sort(spec.active.begin(), spec.active.end());
        if (std::adjacent_find(spec.active.begin(), spec.active.end()) !=
            spec.active.end())
            throw InputError("active list contains duplicates");
        for (int t : spec.active)
            if (t < 0 || t >= orbitals.n_orbitals())
                throw InputError("active orbital " + std::to_string(t) +
                                 " out of range");
        if (orbitals.n_electrons % 2 != 0)
            throw InputError("spin-unpolarized pipeline requires an even electron count");
        const int n_occ = orbitals.n_electrons / 2;
        std::set<int> act(spec.active.begin(), spec.active.end());
        for (int t = 0; t < n_occ; ++t)
            if (!act.count(t)) spec.frozen.push_back(t);
        spec.n_active_electrons =
            orbitals.n_electrons - 2 * int(spec.frozen.size());
        spec.validate(orbitals.n_electrons);
        return spec;
    }
    return select_active_space(orbitals.orbital_energies, orbitals.n_electrons, cfg);
}

void write_active_space_json(const std::filesystem::path& path,
                             const ActiveSpaceSpec& spec) {
    nlohmann::ordered_json j;
    j["frozen"] = spec.frozen;
    j["active"] = spec.active;
    j["n_active_electrons"] = spec.n_active_electrons;
    std::ofstream f(path, std::ios::binary);
    f << j.dump(2) << "\n";
}

ActiveSpaceSpec read_active_space_json(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path.string());
    nlohmann::json j;
    f >> j;
    ActiveSpaceSpec spec;
    spec.frozen = j.at("frozen").get<std::vector<int>>();
    spec.active = j.at("active").get<std::vector<int>>();
    spec.n_active_electrons = j.at("n_active_electrons").get<int>();
    return spec;
}

void write_solve_report(const std::filesystem::path& path, const SolveReport& rep) {
    nlohmann::ordered_json j;
    j["energy_hartree"] = rep.energy;
    j["e_const"] = rep.e_const;
    j["n_iterations"] = rep.n_iterations;
    j["grad_norm"] = rep.grad_norm;
    j["occupancies"] = rep.occupancies;
    j["converged"] = rep.converged;
    j["seed"] = rep.seed;
    j["solver"] = rep.solver;
    std::ofstream f(path, std::ios::binary);
    f << j.dump(2) << "\n";
}

nlohmann::ordered_json config_json(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["bundle"] = cfg.bundle.string();
    j["pp_dir"] = cfg.pp_dir.string();
    j["out"] = cfg.out.string();
    j["solver"] = cfg.solver;
    j["active"] = cfg.active;
    j["max_orbitals"] = cfg.max_orbitals;
    j["window_hartree"] = cfg.window;
    j["degeneracy_tol_hartree"] = cfg.degeneracy_tol;
    j["fermi_override"] = cfg.fermi_override;
    j["fermi_level_hartree"] = cfg.fermi_level;
    j["seed"] = cfg.seed;
    j["perturbation"] = cfg.perturbation;
    j["repetitions"] = cfg.repetitions;
    j["max_iterations"] = cfg.max_iterations;
    j["grad_tol"] = cfg.grad_tol;
    j["vacuum_threshold"] = cfg.vacuum_threshold;
    j["grid"] = cfg.grid;
    return j;
}

void write_provenance(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["version"] = "1.0.0";
    j["config"] = config_json(cfg);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(j["config"].dump())));
    j["config_hash"] = hash;
    j["seed"] = cfg.seed;
    j["artifacts"] = {"hamiltonian/hamiltonian.json", "hamiltonian/h_eff.c128",
                      "hamiltonian/h4.bin", "active_space.json", "solve.json",
                      "density.cube", "charges.csv"};
    std::ofstream f(cfg.out / "provenance.json", std::ios::binary);
    f << j.dump(2) << "\n";
}

// removes everything it tracked unless disarmed
class ArtifactGuard {
public:
    void track(const std::filesystem::path& p) { paths_.push_back(p); }
    void disarm() { paths_.clear(); }
    ~ArtifactGuard() {
        std::error_code ec;
        for (const auto& p : paths_) std::filesystem::remove_all(p, ec);
    }

private:
    std::vector<std::filesystem::path> paths_;
};

template <typename Fn>
void run_stage(const char* name, Fn&& fn) {
    try {
        fn();
    } catch (const InputError& e) {
        throw InputError("stage " + std::string(name) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError("stage " + std::string(name) + ": " + e.what());
    }
}

}  // namespace

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open config file " + path.string());
    PipelineConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InputError("config line " + std::to_string(lineno) +
                             ": expected key = value");
        set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void set_config_value(PipelineConfig& cfg, const std::string& key,
                      const std::string& value) {
    auto as_int = [&](const std::string& v) {
        try {
            std::size_t pos = 0;
            const long x = std::stol(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw InputError("config: " + key + ": not an integer: " + v);
        }
    };
    auto as_double = [&](const std::string& v) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw InputError("config: " + key + ": not a number: " + v);
        }
    };
    if (key == "bundle") cfg.bundle = value;
    else if (key == "pp_dir") cfg.pp_dir = value;
    else if (key == "out") cfg.out = value;
    else if (key == "solver") {
        if (value != "ed" && value != "vqe")
            throw InputError("config: solver must be 'ed' or 'vqe', got: " + value);
        cfg.solver = value;
    } else if (key == "active") cfg.active = parse_int_list(value);
    else if (key == "max_orbitals") cfg.max_orbitals = int(as_int(value));
    else if (key == "window") cfg.window = parse_energy(value, key);
    else if (key == "degeneracy_tol") cfg.degeneracy_tol = parse_energy(value, key);
    else if (key == "fermi_level") {
        cfg.fermi_level = parse_energy(value, key);
        cfg.fermi_override = true;
    } else if (key == "seed") cfg.seed = std::uint64_t(as_int(value));
    else if (key == "perturbation") cfg.perturbation = as_double(value);
    else if (key == "repetitions") cfg.repetitions = int(as_int(value));
    else if (key == "max_iterations") cfg.max_iterations = int(as_int(value));
    else if (key == "grad_tol") cfg.grad_tol = parse_energy(value, key);
    else if (key == "vacuum_threshold") cfg.vacuum_threshold = as_double(value);
    else if (key == "grid") {
        const auto v = parse_int_list(value);
        if (v.size() != 3) throw InputError("config: grid needs three dimensions");
        cfg.grid = {v[0], v[1], v[2]};
    } else if (key == "threads") cfg.threads = int(as_int(value));
    else throw InputError("config: unknown key '" + key + "'");
}

ActiveSpaceSpec select_active_space(const std::vector<double>& orbital_energies,
                                    int n_electrons, const PipelineConfig& cfg) {
    const int n = int(orbital_energies.size());
    if (n == 0) throw InputError("active space selection: no orbitals");
    for (int i = 1; i < n; ++i)
        if (orbital_energies[i] < orbital_energies[i - 1] - 1e-12)
            throw InputError("active space selection: orbital energies not ascending");
    if (n_electrons % 2 != 0)
        throw InputError("spin-unpolarized pipeline requires an even electron count");
    const int n_occ = n_electrons / 2;
    if (n_occ > n)
        throw InputError("more electrons than orbitals in the bundle");

    double fermi;
    if (cfg.fermi_override) {
        fermi = cfg.fermi_level;
    } else {
        if (n_occ == 0 || n_occ == n)
            throw InputError("Fermi level undefined (no HOMO-LUMO gap at this "
                             "band count); set fermi_level or an explicit active list");
        fermi = 0.5 * (orbital_energies[n_occ - 1] + orbital_energies[n_occ]);
    }

    // whole degenerate shells, chained by the degeneracy tolerance
    struct Shell {
        int first = 0;
        int count = 0;
        double dist = 0.0;
    };
    std::vector<Shell> shells;
    for (int i = 0; i < n; ++i) {
        if (!shells.empty() &&
            orbital_energies[i] - orbital_energies[i - 1] <= cfg.degeneracy_tol) {
            ++shells.back().count;
        } else {
            shells.push_back({i, 1, 0.0});
        }
    }
    for (auto& sh : shells) {
        double d = 1e300;
        for (int i = sh.first; i < sh.first + sh.count; ++i)
            d = std::min(d, std::abs(orbital_energies[i] - fermi));
        sh.dist = d;
    }
    std::vector<int> order(shells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (shells[a].dist != shells[b].dist) return shells[a].dist < shells[b].dist;
        return shells[a].first < shells[b].first;
    });

    ActiveSpaceSpec spec;
    for (int si : order) {
        const Shell& sh = shells[si];
        if (!(sh.dist < cfg.window)) break;
        const int remaining = cfg.max_orbitals - int(spec.active.size());
        if (remaining == 0) break;
        if (sh.count > remaining) {
            std::string members;
            for (int i = sh.first; i < sh.first + sh.count; ++i)
                members += (members.empty() ? "" : ", ") + std::to_string(i);
            throw InputError("active space selection would split the degenerate "
                             "shell {" + members + "}; raise max_orbitals or give "
                             "an explicit active list");
        }
        for (int i = sh.first; i < sh.first + sh.count; ++i) spec.active.push_back(i);
    }
    if (spec.active.empty())
        throw InputError("active space selection: no orbitals inside the energy window");
    std::sort(spec.active.begin(), spec.active.end());
    std::set<int> act(spec.active.begin(), spec.active.end());
    for (int t = 0; t < n_occ; ++t)
        if (!act.count(t)) spec.frozen.push_back(t);
    spec.n_active_electrons = n_electrons - 2 * int(spec.frozen.size());
    spec.validate(n_electrons);
    return spec;
}

void stage_hamiltonian(const PipelineConfig& cfg) {
    run_stage("hamiltonian", [&] {
        apply_thread_budget(cfg);
        const LoadedInputs in = load_inputs(cfg);
        const ActiveSpaceSpec spec = resolve_active(cfg, in.orbitals);

        const EwaldParameters ewald =
            select_sigma(in.cell, in.z_valence, in.orbitals.g_cut());
        const double e_nn = nuclear_repulsion(in.cell, in.z_valence, ewald);
        const double e_self =
            electron_self_energy(in.orbitals.n_electrons, in.cell, ewald);

        const OneBodyMatrix h_full = one_body_ks(in.orbitals, in.cell, in.per_atom);

        // index universe: frozen + active, ascending
        std::vector<int> universe = spec.frozen;
        universe.insert(universe.end(), spec.active.begin(), spec.active.end());
        std::sort(universe.begin(), universe.end());
        std::map<int, int> pos;
        for (std::size_t i = 0; i < universe.size(); ++i) pos[universe[i]] = int(i);

        OneBodyMatrix h(universe.size(), universe.size());
        for (std::size_t i = 0; i < universe.size(); ++i)
            for (std::size_t j = 0; j < universe.size(); ++j)
                h(i, j) = h_full(universe[i], universe[j]);
        const TwoBodyTensor h4 = two_body_ks(in.orbitals, in.cell, universe);

        ActiveSpaceSpec local;
        for (int t : spec.frozen) local.frozen.push_back(pos.at(t));
        for (int t : spec.active) local.active.push_back(pos.at(t));
        local.n_active_electrons = spec.n_active_electrons;

        const ActiveSpaceHamiltonian ham =
            assemble_hamiltonian(h, h4, e_nn, e_self, local);

        std::filesystem::create_directories(cfg.out);
        ArtifactGuard guard;
        guard.track(cfg.out / "hamiltonian");
        guard.track(cfg.out / "active_space.json");
        write_hamiltonian(cfg.out / "hamiltonian", ham);
        write_active_space_json(cfg.out / "active_space.json", spec);
        guard.disarm();
    });
}

void stage_solve(const PipelineConfig& cfg) {
    run_stage("solve", [&] {
        apply_thread_budget(cfg);
        const ActiveSpaceHamiltonian ham = load_hamiltonian(cfg.out / "hamiltonian");
        const QubitHamiltonian qh = jordan_wigner(ham, cfg.qubit_budget_orbitals);

        SolveReport rep;
        rep.e_const = ham.e_const;
        rep.seed = cfg.seed;
        rep.solver = cfg.solver;
        if (cfg.solver == "ed") {
            const GroundState gs = exact_ground_state(qh, ham.n_electrons);
            rep.energy = gs.energy;
            rep.occupancies = occupancies(gs.state);
        } else if (cfg.solver == "vqe") {
            const UccsdAnsatz ansatz =
                UccsdAnsatz::standard(ham.n_active, ham.n_electrons, cfg.repetitions);
            VqeOptions opt;
            opt.max_iterations = cfg.max_iterations;
            opt.grad_tol = cfg.grad_tol;
            opt.seed = cfg.seed;
            opt.perturbation = cfg.perturbation;
            const VqeResult res = vqe_minimize(qh, ansatz, opt);
            rep.energy = res.energy;
            rep.n_iterations = res.n_iterations;
            rep.grad_norm = res.grad_norm;
            rep.converged = res.converged;
            rep.occupancies = occupancies(res.state);
            if (!res.converged)
                std::fprintf(stderr,
                             "warning: VQE did not converge (grad norm %.3e after %d "
                             "iterations); reporting best iterate\n",
                             res.grad_norm, res.n_iterations);
        } else {
            throw InputError("unknown solver '" + cfg.solver + "'");
        }

        std::filesystem::create_directories(cfg.out);
        ArtifactGuard guard;
        guard.track(cfg.out / "solve.json");
        write_solve_report(cfg.out / "solve.json", rep);
        guard.disarm();
    });
}

void stage_bader(const PipelineConfig& cfg) {
    run_stage("bader", [&] {
        apply_thread_budget(cfg);
        const LoadedInputs in = load_inputs(cfg);
        ActiveSpaceSpec spec;
        if (std::filesystem::exists(cfg.out / "active_space.json"))
            spec = read_active_space_json(cfg.out / "active_space.json");
        else
            spec = resolve_active(cfg, in.orbitals);
        const SolveReport rep = load_solve_report(cfg.out / "solve.json");
        if (rep.occupancies.size() != spec.active.size())
            throw InputError("solve report does not match the active space");

        std::vector<double> occ(in.orbitals.n_orbitals(), 0.0);
        for (int t : spec.frozen) occ[t] = 2.0;
        for (std::size_t i = 0; i < spec.active.size(); ++i)
            occ[spec.active[i]] = rep.occupancies[i];

        std::array<int, 3> dims = cfg.grid;
        if (dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
            dims = fft_grid_dims(in.cell, 2.0 * in.orbitals.g_cut());

        const VolumetricDensity dens =
            assemble_density(in.orbitals, in.cell, occ, dims);
        BaderOptions opt;
        opt.vacuum_threshold = cfg.vacuum_threshold;
        const BaderPartition part = bader_partition(dens, in.cell, opt);
        const std::vector<double> bec = excess_charges(part, in.z_valence);

        std::filesystem::create_directories(cfg.out);
        ArtifactGuard guard;
        guard.track(cfg.out / "density.cube");
        guard.track(cfg.out / "charges.csv");
        guard.track(cfg.out / "provenance.json");
        write_cube(cfg.out / "density.cube", dens, in.cell, in.z_valence);
        write_charges_csv(cfg.out / "charges.csv", in.cell, in.z_valence, part, bec);
        write_provenance(cfg);
        guard.disarm();
    });
}

void run_pipeline(const PipelineConfig& cfg) {
    stage_hamiltonian(cfg);
    stage_solve(cfg);
    stage_bader(cfg);
}

SolveReport load_solve_report(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw InputError("cannot open " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("solve report: " + std::string(e.what()));
    }
    SolveReport rep;
    rep.energy = j.at("energy_hartree").get<double>();
    rep.e_const = j.at("e_const").get<double>();
    rep.n_iterations = j.at("n_iterations").get<int>();
    rep.grad_norm = j.at("grad_norm").get<double>();
    rep.occupancies = j.at("occupancies").get<std::vector<double>>();
    rep.converged = j.at("converged").get<bool>();
    rep.seed = j.at("seed").get<std::uint64_t>();
    rep.solver = j.at("solver").get<std::string>();
    return rep;
}

}  // namespace pwmb
