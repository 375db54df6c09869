// Timing comparison of the OpenMP kernels against their serial reference
// implementations. Prints one line per kernel with both times and the speedup.

#include <chrono>
#include <cstdio>
#include <random>

#include "pwmb/density_bader.hpp"
#include "pwmb/ewald.hpp"
#include "pwmb/matelems.hpp"
#include "pwmb/solver.hpp"

using namespace pwmb;
using clk = std::chrono::steady_clock;

namespace {

double time_of(const std::function<void()>& body, int repeats = 3) {
    double best = 1e30;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = clk::now();
        body();
        best = std::min(best, std::chrono::duration<double>(clk::now() - t0).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-24s serial %8.3f s   parallel %8.3f s   speedup %5.2fx\n", name,
                serial, parallel, serial / parallel);
}

CrystalCell cubic(double a) {
    CrystalCell cell;
    cell.lattice.col[0] = {a, 0.0, 0.0};
    cell.lattice.col[1] = {0.0, a, 0.0};
    cell.lattice.col[2] = {0.0, 0.0, a};
    return cell;
}

PlaneWaveOrbitalSet random_orbitals(const CrystalCell& cell, double e_cut, int n_orb,
                                    std::uint64_t seed) {
    PlaneWaveOrbitalSet orb;
    orb.e_cut = e_cut;
    const auto basis = ReciprocalBasis::from_cell(cell, e_cut);
    orb.b_vectors = basis.b_vectors;
    orb.g_vectors = generate_g_sphere(basis);
    orb.orbital_energies.assign(n_orb, 0.0);
    const int ng = orb.n_gvecs();
    orb.coefficients.resize(std::size_t(n_orb) * ng);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < n_orb; ++t) {
        double n2 = 0.0;
        for (int g = 0; g < ng; ++g) {
            orb.coeff(g, t) = cplx(nd(rng), nd(rng));
            n2 += std::norm(orb.coeff(g, t));
        }
        for (int g = 0; g < ng; ++g) orb.coeff(g, t) /= std::sqrt(n2);
    }
    return orb;
}

}  // namespace

int main() {
    // Ewald nuclear repulsion: 64 atoms, deep shell counts
    {
        CrystalCell cell = cubic(12.0);
        std::vector<double> z;
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> ud(0.5, 11.5);
        for (int i = 0; i < 64; ++i) {
            Atom a;
            a.species = "X";
            a.position = {ud(rng), ud(rng), ud(rng)};
            cell.atoms.push_back(a);
            z.push_back(double(1 + i % 4));
        }
        EwaldParameters params;
        params.sigma = 0.25;
        params.real_shell_count = 4;
        params.recip_shell_count = 10;
        volatile double sink = 0.0;
        const double ts = time_of([&] { sink = nuclear_repulsion_serial(cell, z, params); });
        const double tp = time_of([&] { sink = nuclear_repulsion(cell, z, params); });
        (void)sink;
        report("ewald", ts, tp);
    }

    // electron repulsion integrals: 6 orbitals, ~2000 G-vectors
    {
        const CrystalCell cell = cubic(10.0);
        const auto orb = random_orbitals(cell, 4.0, 6, 2);
        std::vector<int> all(orb.n_orbitals());
        for (int t = 0; t < orb.n_orbitals(); ++t) all[t] = t;
        const double ts = time_of([&] { two_body_ks_serial(orb, cell, all); }, 2);
        const double tp = time_of([&] { two_body_ks(orb, cell, all); }, 2);
        report("two_body_ks", ts, tp);
    }

    // statevector Hamiltonian application: 14 qubits, dense random terms
    {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> nd(0.0, 1.0);
        QubitHamiltonian qh;
        qh.n_qubits = 14;
        std::uniform_int_distribution<std::uint32_t> bits(0, (1u << 14) - 1);
        for (int i = 0; i < 400; ++i) qh.terms.push_back({bits(rng), bits(rng), nd(rng)});
        Statevector psi = Statevector::basis_state(14, 0);
        for (auto& a : psi.amplitudes) a = cplx(nd(rng), nd(rng));
        Statevector out;
        const double ts = time_of([&] { apply_hamiltonian(qh, psi, out, false); });
        const double tp = time_of([&] { apply_hamiltonian(qh, psi, out, true); });
        report("apply_hamiltonian", ts, tp);
    }

    // density assembly: 8 orbitals on a 60^3 grid
    {
        const CrystalCell cell = cubic(10.0);
        const auto orb = random_orbitals(cell, 4.0, 8, 4);
        const std::vector<double> occ(8, 1.0);
        const std::array<int, 3> dims{60, 60, 60};
        const double ts = time_of([&] { assemble_density(orb, cell, occ, dims, false); }, 2);
        const double tp = time_of([&] { assemble_density(orb, cell, occ, dims, true); }, 2);
        report("assemble_density", ts, tp);
    }
    return 0;
}
