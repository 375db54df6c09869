#include "pwmb/activespace.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "json.hpp"

namespace pwmb {

void ActiveSpaceSpec::validate(int n_electrons_total) const {
    std::set<int> f(frozen.begin(), frozen.end());
    for (int t : active)
        if (f.count(t))
            throw InputError("active space: orbital " + std::to_string(t) +
                             " is both frozen and active");
    if (n_active_electrons < 0 || n_active_electrons % 2 != 0)
        throw InputError("active space: electron count must be even and non-negative");
    if (n_active_electrons > 2 * int(active.size()))
        throw InputError("active space: more electrons than active spin orbitals");
    if (n_active_electrons + 2 * int(frozen.size()) != n_electrons_total)
        throw InputError("active space: electron bookkeeping mismatch");
}

double frozen_core_energy(const OneBodyMatrix& h, const TwoBodyTensor& h4,
                          const std::vector<int>& frozen) {
    double e = 0.0;
    for (int a : frozen) e += 2.0 * h(a, a).real();
    for (int a : frozen)
        for (int b : frozen)
            e += (2.0 * h4(a, b, b, a) - h4(a, b, a, b)).real();
    return e;
}

OneBodyMatrix frozen_core_potential(const TwoBodyTensor& h4, const std::vector<int>& frozen,
                                    const std::vector<int>& active) {
    const int n = int(active.size());
    OneBodyMatrix g = OneBodyMatrix::Zero(n, n);
    for (int t = 0; t < n; ++t)
        for (int u = 0; u < n; ++u)
            for (int a : frozen)
                g(t, u) += 2.0 * h4(active[t], a, a, active[u]) -
                           h4(active[t], a, active[u], a);
    return g;
}

ActiveSpaceHamiltonian assemble_hamiltonian(const OneBodyMatrix& h, const TwoBodyTensor& h4,
                                            double e_nn, double e_self,
                                            const ActiveSpaceSpec& spec) {
    const int dim = h4.dim();
    if (h.rows() != dim || h.cols() != dim)
        throw InputError("assemble_hamiltonian: h and h4 dimensions differ");
    for (int t : spec.frozen)
        if (t < 0 || t >= dim)
            throw InputError("assemble_hamiltonian: frozen index " + std::to_string(t) +
                             " has no matrix element row");
    for (int t : spec.active)
        if (t < 0 || t >= dim)
            throw InputError("assemble_hamiltonian: active index " + std::to_string(t) +
                             " has no matrix element row");

    ActiveSpaceHamiltonian out;
    out.n_active = int(spec.active.size());
    out.n_electrons = spec.n_active_electrons;
    out.e_const = e_nn + e_self + frozen_core_energy(h, h4, spec.frozen);
    out.h_eff = frozen_core_potential(h4, spec.frozen, spec.active);
    for (int t = 0; t < out.n_active; ++t)
        for (int u = 0; u < out.n_active; ++u)
            out.h_eff(t, u) += h(spec.active[t], spec.active[u]);
    out.h4 = TwoBodyTensor(out.n_active);
    for (int t = 0; t < out.n_active; ++t)
        for (int u = 0; u < out.n_active; ++u)
            for (int v = 0; v < out.n_active; ++v)
                for (int w = 0; w < out.n_active; ++w)
                    out.h4.set(t, u, v, w,
                               h4(spec.active[t], spec.active[u], spec.active[v],
                                  spec.active[w]));
    return out;
}

SpinResolvedFrozenCore spin_resolved_frozen_core(
    const std::array<OneBodyMatrix, 2>& h,
    const std::array<std::array<TwoBodyTensor, 2>, 2>& h4,
    const std::vector<int>& frozen, const std::vector<int>& active) {
    SpinResolvedFrozenCore out;
    for (int s = 0; s < 2; ++s) {
        for (int a : frozen) out.e_frozen += h[s](a, a).real();
        for (int a : frozen)
            for (int b : frozen) {
                cplx direct(0.0);
                for (int t = 0; t < 2; ++t) direct += h4[s][t](a, b, b, a);
                out.e_frozen += 0.5 * (direct - h4[s][s](a, b, a, b)).real();
            }
    }
    const int n = int(active.size());
    for (int s = 0; s < 2; ++s) {
        out.g[s] = OneBodyMatrix::Zero(n, n);
        for (int t = 0; t < n; ++t)
            for (int u = 0; u < n; ++u)
                for (int b : frozen) {
                    cplx direct(0.0);
                    for (int tau = 0; tau < 2; ++tau)
                        direct += h4[s][tau](active[t], b, b, active[u]);
                    out.g[s](t, u) += direct - h4[s][s](active[t], b, active[u], b);
                }
    }
    return out;
}

void write_hamiltonian(const std::filesystem::path& dir, const ActiveSpaceHamiltonian& ham) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json j;
    j["n_active"] = ham.n_active;
    j["n_electrons"] = ham.n_electrons;
    j["e_const"] = ham.e_const;
    {
        std::ofstream f(dir / "hamiltonian.json", std::ios::binary);
        f << j.dump(2) << "\n";
    }
    {
        std::ofstream f(dir / "h_eff.c128", std::ios::binary);
        for (int t = 0; t < ham.n_active; ++t)
            for (int u = 0; u < ham.n_active; ++u) {
                const cplx v = ham.h_eff(t, u);
                f.write(reinterpret_cast<const char*>(&v), sizeof(v));
            }
    }
    {
        std::ofstream f(dir / "h4.bin", std::ios::binary);
        const int n = ham.n_active;
        for (int t = 0; t < n; ++t)
            for (int u = 0; u < n; ++u)
                for (int v = 0; v < n; ++v)
                    for (int w = 0; w < n; ++w) {
                        if (!ham.h4.is_canonical(t, u, v, w)) continue;
                        const std::int32_t idx[4] = {t, u, v, w};
                        const cplx val = ham.h4(t, u, v, w);
                        f.write(reinterpret_cast<const char*>(idx), sizeof(idx));
                        f.write(reinterpret_cast<const char*>(&val), sizeof(val));
                    }
    }
}

ActiveSpaceHamiltonian load_hamiltonian(const std::filesystem::path& dir) {
    std::ifstream jf(dir / "hamiltonian.json");
    if (!jf) throw InputError("cannot open " + (dir / "hamiltonian.json").string());
    nlohmann::json j;
    try {
        jf >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("hamiltonian.json: " + std::string(e.what()));
    }
    ActiveSpaceHamiltonian ham;
    ham.n_active = j.at("n_active").get<int>();
    ham.n_electrons = j.at("n_electrons").get<int>();
    ham.e_const = j.at("e_const").get<double>();
    if (ham.n_active <= 0) throw InputError("hamiltonian.json: n_active must be positive");

    ham.h_eff = OneBodyMatrix(ham.n_active, ham.n_active);
    {
        std::ifstream f(dir / "h_eff.c128", std::ios::binary);
        if (!f) throw InputError("cannot open " + (dir / "h_eff.c128").string());
        for (int t = 0; t < ham.n_active; ++t)
            for (int u = 0; u < ham.n_active; ++u) {
                cplx v;
                if (!f.read(reinterpret_cast<char*>(&v), sizeof(v)))
                    throw InputError("h_eff.c128: truncated");
                ham.h_eff(t, u) = v;
            }
    }
    ham.h4 = TwoBodyTensor(ham.n_active);
    {
        std::ifstream f(dir / "h4.bin", std::ios::binary);
        if (!f) throw InputError("cannot open " + (dir / "h4.bin").string());
        std::int32_t idx[4];
        cplx val;
        while (f.read(reinterpret_cast<char*>(idx), sizeof(idx))) {
            if (!f.read(reinterpret_cast<char*>(&val), sizeof(val)))
                throw InputError("h4.bin: truncated record");
            for (int k = 0; k < 4; ++k)
                if (idx[k] < 0 || idx[k] >= ham.n_active)
                    throw InputError("h4.bin: index out of range");
            ham.h4.set(idx[0], idx[1], idx[2], idx[3], val);
        }
    }
    return ham;
}

}  // namespace pwmb
