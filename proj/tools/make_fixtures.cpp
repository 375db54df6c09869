// Generates the committed regression fixtures: small hydride cells with
// atom-centered Gaussian orbitals whose covalent mixing is tuned so the Bader
// excess charges land on fixed reference values.

#include <cstdio>
#include <fstream>
#include <vector>

#include "pwmb/pwio.hpp"
#include "pwmb/lattice.hpp"

using namespace pwmb;
namespace fs = std::filesystem;

namespace {

void write_upf(const fs::path& path, const std::string& element, double z) {
    const std::size_t n = 1201;
    const double h = 0.01;
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i + 2 < n; i += 2) {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
    }
    std::ofstream f(path, std::ios::binary);
    char buf[64];
    f << "<UPF version=\"2.0.1\">\n<PP_HEADER element=\"" << element
      << "\" pseudo_type=\"NC\" z_valence=\"" << z << "\" l_max=\"0\"/>\n<PP_MESH>\n";
    auto column = [&](const char* tag, auto value) {
        f << "<" << tag << ">\n";
        for (std::size_t i = 0; i < n; ++i) {
            std::snprintf(buf, sizeof(buf), "%.16e\n", value(i));
            f << buf;
        }
        f << "</" << tag << ">\n";
    };
    column("PP_R", [&](std::size_t i) { return h * double(i); });
    column("PP_RAB", [&](std::size_t i) { return w[i]; });
    f << "</PP_MESH>\n";
    column("PP_LOCAL", [&](std::size_t i) {
        const double r = h * double(i);
        const double v_ha = (r > 0.0) ? -z * std::erf(r) / r : -z * 2.0 / std::sqrt(kPi);
        return v_ha / kRydbergToHartree;  // file stores Rydberg
    });
    f << "</UPF>\n";
}

struct Basis {
    PlaneWaveOrbitalSet orb;

    void add_s(const Vec3& center, double w) { add(center, w, -1); }
    void add_p(const Vec3& center, double w, int axis) { add(center, w, axis); }

    // column of raw (unorthogonalized) coefficients; real orbitals in real space
    void add(const Vec3& center, double w, int axis) {
        const int ng = orb.n_gvecs();
        std::vector<cplx> col(ng);
        for (int g = 0; g < ng; ++g) {
            const Vec3 gv = orb.g_cartesian(g);
            const double amp = std::exp(-gv.norm2() * w * w);
            const cplx shape = (axis < 0) ? cplx(amp, 0.0) : cplx(0.0, gv[axis] * amp);
            col[g] = shape * std::exp(cplx(0.0, -gv.dot(center)));
        }
        raw.push_back(std::move(col));
    }

    void add_mix(const std::vector<std::pair<double, int>>& parts) {
        const int ng = orb.n_gvecs();
        std::vector<cplx> col(ng, cplx(0.0));
        for (const auto& [coeff, idx] : parts)
            for (int g = 0; g < ng; ++g) col[g] += coeff * normalized(idx)[g];
        raw.push_back(std::move(col));
    }

    const std::vector<cplx>& normalized(int idx) {
        auto& col = raw[idx];
        double n2 = 0.0;
        for (const auto& c : col) n2 += std::norm(c);
        const double s = 1.0 / std::sqrt(n2);
        for (auto& c : col) c *= s;
        return col;
    }

    // Gram-Schmidt in coefficient space, then pack into the orbital set
    void finish(const std::vector<double>& energies, int n_electrons) {
        const int ng = orb.n_gvecs();
        for (std::size_t t = 0; t < raw.size(); ++t) {
            for (std::size_t s = 0; s < t; ++s) {
                cplx ov(0.0);
                for (int g = 0; g < ng; ++g) ov += std::conj(raw[s][g]) * raw[t][g];
                for (int g = 0; g < ng; ++g) raw[t][g] -= ov * raw[s][g];
            }
            double n2 = 0.0;
            for (const auto& c : raw[t]) n2 += std::norm(c);
            const double s = 1.0 / std::sqrt(n2);
            for (auto& c : raw[t]) c *= s;
        }
        orb.orbital_energies = energies;
        orb.n_electrons = n_electrons;
        orb.coefficients.resize(raw.size() * std::size_t(ng));
        for (std::size_t t = 0; t < raw.size(); ++t)
            for (int g = 0; g < ng; ++g) orb.coeff(g, int(t)) = raw[t][g];
    }

    std::vector<std::vector<cplx>> raw;
};

Basis start_basis(const CrystalCell& cell, double e_cut) {
    Basis b;
    b.orb.e_cut = e_cut;
    const auto rb = ReciprocalBasis::from_cell(cell, e_cut);
    b.orb.b_vectors = rb.b_vectors;
    b.orb.g_vectors = generate_g_sphere(rb);
    return b;
}

CrystalCell hydride_cell(const std::string& metal, const std::string& metal_upf) {
    CrystalCell cell;
    cell.lattice.col[0] = {12.0, 0.0, 0.0};
    cell.lattice.col[1] = {0.0, 12.0, 0.0};
    cell.lattice.col[2] = {0.0, 0.0, 12.0};
    Atom a;
    a.species = metal;
    a.position = {6.0, 6.0, 6.0};
    a.upf = metal_upf;
    cell.atoms.push_back(a);
    a.species = "H";
    a.upf = "h.upf";
    a.position = {3.0, 6.0, 6.0};
    cell.atoms.push_back(a);
    a.position = {9.0, 6.0, 6.0};
    cell.atoms.push_back(a);
    return cell;
}

void write_config(const fs::path& dir, const std::string& active) {
    std::ofstream f(dir / "run.conf", std::ios::binary);
    f << "bundle = bundle\n"
      << "pp_dir = pp\n"
      << "out = out\n"
      << "solver = vqe\n"
      << "active = " << active << "\n"
      << "seed = 1\n"
      << "perturbation = 0.01\n"
      << "grad_tol = 5e-7\n";
}

void write_expected(const fs::path& dir, const std::string& species, double bec) {
    std::ofstream f(dir / "expected.json", std::ios::binary);
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "{\n  \"atom\": 0,\n  \"species\": \"%s\",\n  \"bec\": %.2f,\n"
                  "  \"tol\": 0.02\n}\n",
                  species.c_str(), bec);
    f << buf;
}

// alpha2: weight of the metal component in each bonding orbital
void make_mgh2(const fs::path& dir, double alpha2) {
    const CrystalCell cell = hydride_cell("Mg", "mg.upf");
    const Vec3 M = cell.atoms[0].position, H1 = cell.atoms[1].position,
               H2 = cell.atoms[2].position;
    Basis b = start_basis(cell, 6.0);
    // 0..3: metal semicore shell (8 electrons)
    b.add_s(M, 0.5);
    b.add_p(M, 0.5, 0);
    b.add_p(M, 0.5, 1);
    b.add_p(M, 0.5, 2);
    // bonding combinations carrying the metal -> hydrogen charge transfer
    const double alpha = std::sqrt(alpha2);
    const double beta = std::sqrt((1.0 - alpha2) / 2.0);
    b.add_s(M, 0.9);   // 4 (helper)
    b.add_s(H1, 0.7);  // 5 (helper)
    b.add_s(H2, 0.7);  // 6 (helper)
    b.add_p(M, 0.9, 0);  // 7 (helper)
    b.add_mix({{alpha, 4}, {beta, 5}, {beta, 6}});    // 8: symmetric bond
    b.add_mix({{alpha, 7}, {beta, 5}, {-beta, 6}});   // 9: antisymmetric bond
    // drop the helpers, keep cores + bonds + virtuals
    std::vector<std::vector<cplx>> cols;
    for (int i : {0, 1, 2, 3, 8, 9}) cols.push_back(std::move(b.raw[i]));
    b.raw = std::move(cols);
    // 6, 7: tight high-kinetic virtuals on the metal
    b.add_s(M, 0.3);
    b.add_p(M, 0.3, 0);
    b.finish({-3.0, -2.5, -2.5, -2.5, -0.8, -0.7, 1.5, 1.8}, 12);

    fs::create_directories(dir / "pp");
    write_bundle(dir / "bundle", cell, b.orb);
    write_upf(dir / "pp" / "mg.upf", "Mg", 10.0);
    write_upf(dir / "pp" / "h.upf", "H", 1.0);
    write_config(dir, "5 6 7");
    write_expected(dir, "Mg", 1.58);
}

void make_crh2(const fs::path& dir, double alpha2) {
    const CrystalCell cell = hydride_cell("Cr", "cr.upf");
    const Vec3 M = cell.atoms[0].position, H1 = cell.atoms[1].position,
               H2 = cell.atoms[2].position;
    Basis b = start_basis(cell, 6.0);
    // 0..5: metal semicore + valence shell (12 electrons)
    b.add_s(M, 0.4);
    b.add_p(M, 0.4, 0);
    b.add_p(M, 0.4, 1);
    b.add_p(M, 0.4, 2);
    b.add_s(M, 0.6);
    b.add_p(M, 0.6, 1);
    const double alpha = std::sqrt(alpha2);
    const double beta = std::sqrt((1.0 - alpha2) / 2.0);
    b.add_s(M, 0.9);     // 6 (helper)
    b.add_s(H1, 0.7);    // 7 (helper)
    b.add_s(H2, 0.7);    // 8 (helper)
    b.add_p(M, 0.9, 0);  // 9 (helper)
    b.add_mix({{alpha, 6}, {beta, 7}, {beta, 8}});
    b.add_mix({{alpha, 9}, {beta, 7}, {-beta, 8}});
    std::vector<std::vector<cplx>> cols;
    for (int i : {0, 1, 2, 3, 4, 5, 10, 11}) cols.push_back(std::move(b.raw[i]));
    b.raw = std::move(cols);
    b.add_s(M, 0.3);
    b.add_p(M, 0.3, 2);
    b.finish({-4.0, -3.5, -3.5, -3.5, -1.5, -1.4, -0.8, -0.7, 1.5, 1.8}, 16);

    fs::create_directories(dir / "pp");
    write_bundle(dir / "bundle", cell, b.orb);
    write_upf(dir / "pp" / "cr.upf", "Cr", 14.0);
    write_upf(dir / "pp" / "h.upf", "H", 1.0);
    write_config(dir, "7 8 9");
    write_expected(dir, "Cr", 0.96);
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? argv[1] : "fixtures";
    const double a2_mg = argc > 2 ? std::stod(argv[2]) : 0.0945;
    const double a2_cr = argc > 3 ? std::stod(argv[3]) : 0.726;
    make_mgh2(root / "mgh2", a2_mg);
    make_crh2(root / "crh2", a2_cr);
    std::printf("fixtures written to %s (alpha2 = %.4f / %.4f)\n", root.string().c_str(),
                a2_mg, a2_cr);
    return 0;
}
