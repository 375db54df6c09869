#include "pwmb/pwio.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace pwmb {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

int NormConservingPseudopotential::max_l() const {
    int l = -1;
    for (const auto& p : projectors) l = std::max(l, p.l);
    return l;
}

double NormConservingPseudopotential::radial_integral(const std::vector<double>& f) const {
    double s = 0.0;
    for (std::size_t i = 0; i < r_grid.size(); ++i) s += f[i] * r_weights[i];
    return s;
}

void NormConservingPseudopotential::validate() const {
    const std::size_t n = r_grid.size();
    if (n < 2 || r_weights.size() != n || v_local.size() != n)
        throw InputError("pseudopotential: radial arrays must share one mesh length");
    for (std::size_t i = 1; i < n; ++i)
        if (r_grid[i] <= r_grid[i - 1])
            throw InputError("pseudopotential: radial mesh not strictly increasing");
    const double tail = r_grid[n - 1] * v_local[n - 1];
    if (std::abs(tail + z_valence) / z_valence > 1e-3)
        throw InputError("pseudopotential: r*V_loc(r_max) = " + std::to_string(tail) +
                         " does not match Coulomb tail -" + std::to_string(z_valence));
    for (const auto& p : projectors) {
        if (p.beta.size() != n)
            throw InputError("pseudopotential: projector mesh length mismatch");
        if (std::abs(p.beta[n - 1]) > 1e-8)
            throw InputError("pseudopotential: projector not compactly supported");
    }
    for (const auto& [l, block] : d_blocks) {
        const int m = int(projector_index.at(l).size());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (std::abs(block[i * m + j] - block[j * m + i]) > 1e-12)
                    throw InputError("pseudopotential: D block for l=" + std::to_string(l) +
                                     " not symmetric");
    }
}

namespace {

std::vector<char> read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw InputError("cannot open " + p.string());
    return std::vector<char>((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const void* data, std::size_t bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + p.string());
    out.write(static_cast<const char*>(data), std::streamsize(bytes));
}

double g2_of(const Mat3& b, const Miller& m) {
    return (b * Vec3{double(m[0]), double(m[1]), double(m[2])}).norm2();
}

}  // namespace

std::pair<CrystalCell, PlaneWaveOrbitalSet> load_wavefunction_bundle(const fs::path& dir) {
    json manifest;
    {
        std::ifstream in(dir / "manifest.json");
        if (!in) throw InputError("malformed bundle: missing manifest.json in " + dir.string());
        try {
            in >> manifest;
        } catch (const json::exception& e) {
            throw InputError(std::string("malformed manifest: ") + e.what());
        }
    }
    for (const char* key : {"version", "e_cut_hartree", "n_electrons", "gamma_only",
                            "lattice_bohr", "atoms", "n_orbitals", "n_gvecs",
                            "orbital_energies_hartree"})
        if (!manifest.contains(key))
            throw InputError(std::string("malformed manifest: missing field '") + key + "'");

    CrystalCell cell;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            cell.lattice.col[i][j] = manifest["lattice_bohr"][i][j].get<double>();
    for (const auto& a : manifest["atoms"]) {
        Atom atom;
        atom.species = a["species"].get<std::string>();
        for (int j = 0; j < 3; ++j) atom.position[j] = a["pos_bohr"][j].get<double>();
        atom.upf = a["upf"].get<std::string>();
        atom.position = cell.wrap(atom.position);
        cell.atoms.push_back(atom);
    }
    cell.validate();

    PlaneWaveOrbitalSet orb;
    orb.e_cut = manifest["e_cut_hartree"].get<double>();
    orb.n_electrons = manifest["n_electrons"].get<int>();
    orb.gamma_only = manifest["gamma_only"].get<bool>();
    orb.b_vectors = cell.reciprocal();
    orb.orbital_energies = manifest["orbital_energies_hartree"].get<std::vector<double>>();
    const int n_orbitals = manifest["n_orbitals"].get<int>();
    const int n_gvecs = manifest["n_gvecs"].get<int>();
    if (n_orbitals != int(orb.orbital_energies.size()))
        throw InputError("malformed manifest: n_orbitals does not match orbital_energies");

    const auto graw = read_file(dir / "gvecs.i32");
    if (graw.size() != std::size_t(n_gvecs) * 3 * sizeof(int32_t))
        throw InputError("coefficient/G-vector count mismatch: gvecs.i32 holds " +
                         std::to_string(graw.size() / (3 * sizeof(int32_t))) +
                         " vectors, manifest says " + std::to_string(n_gvecs));
    std::vector<Miller> stored(n_gvecs);
    std::memcpy(stored.data(), graw.data(), graw.size());

    const auto craw = read_file(dir / "coeffs.c128");
    if (craw.size() != std::size_t(n_orbitals) * n_gvecs * sizeof(cplx))
        throw InputError("coefficient/G-vector count mismatch: coeffs.c128 holds " +
                         std::to_string(craw.size() / sizeof(cplx)) + " values, expected " +
                         std::to_string(std::size_t(n_orbitals) * n_gvecs));
    std::vector<cplx> stored_coeffs(std::size_t(n_orbitals) * n_gvecs);
    std::memcpy(stored_coeffs.data(), craw.data(), craw.size());

    const double cut2 = 2.0 * orb.e_cut * (1.0 + 1e-9);
    for (const auto& m : stored)
        if (g2_of(orb.b_vectors, m) > cut2)
            throw InputError("cutoff violation: stored G-vector (" + std::to_string(m[0]) +
                             "," + std::to_string(m[1]) + "," + std::to_string(m[2]) +
                             ") exceeds e_cut");

    // Expand a gamma-only half sphere: c(-G) = conj(c(G)).
    std::map<Miller, std::vector<cplx>> full;  // Miller -> per-orbital coefficient
    for (int g = 0; g < n_gvecs; ++g) {
        const Miller m = stored[g];
        const Miller neg{-m[0], -m[1], -m[2]};
        if (full.count(m))
            throw InputError("malformed bundle: duplicate G-vector in gvecs.i32");
        std::vector<cplx> col(n_orbitals);
        for (int t = 0; t < n_orbitals; ++t)
            col[t] = stored_coeffs[std::size_t(t) * n_gvecs + g];
        if (orb.gamma_only && m != Miller{0, 0, 0}) {
            if (full.count(neg))
                throw InputError("malformed bundle: gamma-only data stores both +G and -G");
            std::vector<cplx> conj_col(n_orbitals);
            for (int t = 0; t < n_orbitals; ++t) conj_col[t] = std::conj(col[t]);
            full.emplace(neg, std::move(conj_col));
        }
        full.emplace(m, std::move(col));
    }

    // Canonical order: (|G|^2, then lexicographic Miller index).
    std::vector<Miller> order;
    order.reserve(full.size());
    for (const auto& kv : full) order.push_back(kv.first);
    std::sort(order.begin(), order.end(), [&](const Miller& x, const Miller& y) {
        const double gx = g2_of(orb.b_vectors, x), gy = g2_of(orb.b_vectors, y);
        if (gx != gy) return gx < gy;
        return x < y;
    });
    orb.g_vectors = order;
    orb.coefficients.resize(std::size_t(n_orbitals) * order.size());
    for (std::size_t g = 0; g < order.size(); ++g) {
        const auto& col = full.at(order[g]);
        for (int t = 0; t < n_orbitals; ++t)
            orb.coefficients[std::size_t(t) * order.size() + g] = col[t];
    }
    orb.gamma_only = false;  // in-memory form is always the full sphere

    for (int t = 0; t < n_orbitals; ++t) {
        double norm2 = 0.0;
        for (int g = 0; g < orb.n_gvecs(); ++g) norm2 += std::norm(orb.coeff(g, t));
        const double norm = std::sqrt(norm2);
        if (std::abs(norm - 1.0) > 1e-8) {
            std::ostringstream msg;
            msg << "orbital " << t << " norm " << norm;
            throw InputError(msg.str());
        }
    }
    return {cell, orb};
}

void write_bundle(const fs::path& dir, const CrystalCell& cell,
                  const PlaneWaveOrbitalSet& orbitals) {
    fs::create_directories(dir);
    json manifest;
    manifest["version"] = 1;
    manifest["e_cut_hartree"] = orbitals.e_cut;
    manifest["n_electrons"] = orbitals.n_electrons;
    manifest["gamma_only"] = false;
    json lat = json::array();
    for (int i = 0; i < 3; ++i)
        lat.push_back({cell.lattice.col[i][0], cell.lattice.col[i][1], cell.lattice.col[i][2]});
    manifest["lattice_bohr"] = lat;
    json atoms = json::array();
    for (const auto& a : cell.atoms)
        atoms.push_back({{"species", a.species},
                         {"pos_bohr", {a.position.x, a.position.y, a.position.z}},
                         {"upf", a.upf}});
    manifest["atoms"] = atoms;
    manifest["n_orbitals"] = orbitals.n_orbitals();
    manifest["n_gvecs"] = orbitals.n_gvecs();
    manifest["orbital_energies_hartree"] = orbitals.orbital_energies;
    {
        std::ofstream out(dir / "manifest.json", std::ios::trunc);
        out << manifest.dump(2) << "\n";
    }
    std::vector<int32_t> gv;
    gv.reserve(orbitals.g_vectors.size() * 3);
    for (const auto& m : orbitals.g_vectors)
        for (int i = 0; i < 3; ++i) gv.push_back(m[i]);
    write_file(dir / "gvecs.i32", gv.data(), gv.size() * sizeof(int32_t));
    write_file(dir / "coeffs.c128", orbitals.coefficients.data(),
               orbitals.coefficients.size() * sizeof(cplx));
}

// ---------------------------------------------------------------------------
// UPF v2 parsing. UPF is XML but with large whitespace-separated numeric
// bodies, so a small purpose-built scanner is used instead of a DOM parser.

namespace {

constexpr unsigned char uchar(char c) { return static_cast<unsigned char>(c); }

struct UpfTag {
    std::map<std::string, std::string> attrs;
    std::string body;
};

// Finds <name ...attrs...> body </name> or <name ... /> inside `text`.
bool find_tag(const std::string& text, const std::string& name, UpfTag& out) {
    std::size_t pos = 0;
    while (true) {
        pos = text.find("<" + name, pos);
        if (pos == std::string::npos) return false;
        const char after = text[pos + name.size() + 1];
        if (after == '>' || after == ' ' || after == '\t' || after == '\n' ||
            after == '\r' || after == '/')
            break;
        ++pos;  // matched a longer tag name, keep scanning
    }
    std::size_t open_end = pos;
    bool self_closing = false;
    bool in_quote = false;
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (text[i] == '"') in_quote = !in_quote;
        if (!in_quote && text[i] == '>') {
            open_end = i;
            self_closing = (text[i - 1] == '/');
            break;
        }
    }
    const std::string open = text.substr(pos, open_end - pos);
    out.attrs.clear();
    std::size_t ap = name.size() + 1;
    while (ap < open.size()) {
        while (ap < open.size() && (std::isspace(uchar(open[ap])) || open[ap] == '/')) ++ap;
        std::size_t eq = open.find('=', ap);
        if (eq == std::string::npos) break;
        std::string key = open.substr(ap, eq - ap);
        while (!key.empty() && std::isspace(uchar(key.back()))) key.pop_back();
        std::size_t q1 = open.find('"', eq);
        if (q1 == std::string::npos) break;
        std::size_t q2 = open.find('"', q1 + 1);
        if (q2 == std::string::npos) break;
        out.attrs[key] = open.substr(q1 + 1, q2 - q1 - 1);
        ap = q2 + 1;
    }
    if (self_closing) {
        out.body.clear();
        return true;
    }
    const std::string close = "</" + name + ">";
    std::size_t close_pos = text.find(close, open_end);
    if (close_pos == std::string::npos) return false;
    out.body = text.substr(open_end + 1, close_pos - open_end - 1);
    return true;
}

std::vector<double> parse_numbers(const std::string& body) {
    std::vector<double> out;
    std::istringstream in(body);
    double v;
    while (in >> v) out.push_back(v);
    return out;
}

UpfTag require_tag(const std::string& text, const std::string& name) {
    UpfTag tag;
    if (!find_tag(text, name, tag))
        throw InputError("UPF: missing mandatory tag " + name);
    return tag;
}

}  // namespace

NormConservingPseudopotential load_pseudopotential(const fs::path& path) {
    const auto raw = read_file(path);
    const std::string text(raw.begin(), raw.end());

    NormConservingPseudopotential pp;
    UpfTag header = require_tag(text, "PP_HEADER");
    auto attr = [&](const char* key) -> std::string {
        auto it = header.attrs.find(key);
        if (it == header.attrs.end())
            throw InputError(std::string("UPF: PP_HEADER missing attribute ") + key);
        return it->second;
    };
    std::string type = attr("pseudo_type");
    std::transform(type.begin(), type.end(), type.begin(), ::toupper);
    if (type.find("US") != std::string::npos || type.find("ULTRASOFT") != std::string::npos)
        throw InputError("UPF: ultrasoft unsupported (norm-conserving only)");
    if (type.find("PAW") != std::string::npos)
        throw InputError("UPF: PAW unsupported (norm-conserving only)");
    pp.z_valence = std::stod(attr("z_valence"));
    if (header.attrs.count("element")) {
        pp.element = header.attrs["element"];
        pp.element.erase(std::remove_if(pp.element.begin(), pp.element.end(),
                                        [](char c) { return std::isspace(uchar(c)); }),
                         pp.element.end());
    }
    if (pp.z_valence <= 0.0) throw InputError("UPF: z_valence must be positive");

    UpfTag mesh = require_tag(text, "PP_MESH");
    pp.r_grid = parse_numbers(require_tag(mesh.body, "PP_R").body);
    pp.r_weights = parse_numbers(require_tag(mesh.body, "PP_RAB").body);
    const std::size_t n = pp.r_grid.size();
    if (pp.r_weights.size() != n)
        throw InputError("UPF: PP_R and PP_RAB lengths differ");

    pp.v_local = parse_numbers(require_tag(text, "PP_LOCAL").body);
    if (pp.v_local.size() != n)
        throw InputError("UPF: PP_LOCAL length does not match mesh");
    for (auto& v : pp.v_local) v *= kRydbergToHartree;

    UpfTag nonlocal;
    std::vector<double> dij_flat;
    if (find_tag(text, "PP_NONLOCAL", nonlocal)) {
        for (int i = 1;; ++i) {
            UpfTag beta;
            if (!find_tag(nonlocal.body, "PP_BETA." + std::to_string(i), beta)) break;
            if (!beta.attrs.count("angular_momentum"))
                throw InputError("UPF: PP_BETA missing angular_momentum");
            RadialProjector proj;
            proj.l = std::stoi(beta.attrs["angular_momentum"]);
            std::vector<double> rbeta = parse_numbers(beta.body);
            if (rbeta.size() != n)
                throw InputError("UPF: PP_BETA length does not match mesh");
            proj.beta.resize(n);
            for (std::size_t k = 0; k < n; ++k)
                proj.beta[k] = (pp.r_grid[k] > 0.0) ? rbeta[k] / pp.r_grid[k] : 0.0;
            pp.projectors.push_back(std::move(proj));
        }
        if (!pp.projectors.empty()) {
            dij_flat = parse_numbers(require_tag(nonlocal.body, "PP_DIJ").body);
            const std::size_t np = pp.projectors.size();
            if (dij_flat.size() != np * np)
                throw InputError("UPF: PP_DIJ size does not match projector count");
            for (auto& d : dij_flat) d *= kRydbergToHartree;
        }
    }

    // Reshape D into per-l blocks; cross-l couplings must vanish.
    const std::size_t np = pp.projectors.size();
    for (std::size_t i = 0; i < np; ++i)
        pp.projector_index[pp.projectors[i].l].push_back(int(i));
    for (const auto& [l, idx] : pp.projector_index) {
        const std::size_t m = idx.size();
        std::vector<double> block(m * m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b)
                block[a * m + b] = dij_flat[std::size_t(idx[a]) * np + idx[b]];
        pp.d_blocks[l] = std::move(block);
    }
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < np; ++j)
            if (pp.projectors[i].l != pp.projectors[j].l &&
                std::abs(dij_flat[i * np + j]) > 1e-12)
                throw InputError("UPF: PP_DIJ couples different angular momentum channels");

    pp.validate();
    return pp;
}

}  // namespace pwmb
