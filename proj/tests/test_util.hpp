#pragma once

#include <random>

#include "pwmb/lattice.hpp"
#include "pwmb/pwio.hpp"

namespace testutil {

inline pwmb::CrystalCell cubic_cell(double a) {
    pwmb::CrystalCell cell;
    cell.lattice.col[0] = {a, 0.0, 0.0};
    cell.lattice.col[1] = {0.0, a, 0.0};
    cell.lattice.col[2] = {0.0, 0.0, a};
    return cell;
}

// Random orbital set on the canonical G sphere. complex=false produces real
// plane-wave-symmetric coefficients, c(-G) = c(G) real, so the orbitals are
// real functions.
inline pwmb::PlaneWaveOrbitalSet random_orbitals(const pwmb::CrystalCell& cell,
                                                 double e_cut, int n_orbitals,
                                                 std::uint64_t seed,
                                                 bool complex_coeffs = true) {
    pwmb::PlaneWaveOrbitalSet orb;
    orb.e_cut = e_cut;
    const auto basis = pwmb::ReciprocalBasis::from_cell(cell, e_cut);
    orb.b_vectors = basis.b_vectors;
    orb.g_vectors = pwmb::generate_g_sphere(basis);
    orb.orbital_energies.assign(n_orbitals, 0.0);
    orb.n_electrons = 0;
    const int ng = orb.n_gvecs();
    orb.coefficients.assign(std::size_t(n_orbitals) * ng, pwmb::cplx(0.0));

    std::map<pwmb::Miller, int> where;
    for (int g = 0; g < ng; ++g) where[orb.g_vectors[g]] = g;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int t = 0; t < n_orbitals; ++t) {
        orb.orbital_energies[t] = double(t);
        if (complex_coeffs) {
            for (int g = 0; g < ng; ++g)
                orb.coeff(g, t) = pwmb::cplx(nd(rng), nd(rng));
        } else {
            for (int g = 0; g < ng; ++g) {
                const auto& m = orb.g_vectors[g];
                const pwmb::Miller neg{-m[0], -m[1], -m[2]};
                const int gn = where.at(neg);
                if (gn < g) continue;
                const double v = nd(rng);
                orb.coeff(g, t) = pwmb::cplx(v, 0.0);
                orb.coeff(gn, t) = pwmb::cplx(v, 0.0);
            }
        }
        double n2 = 0.0;
        for (int g = 0; g < ng; ++g) n2 += std::norm(orb.coeff(g, t));
        const double scale = 1.0 / std::sqrt(n2);
        for (int g = 0; g < ng; ++g) orb.coeff(g, t) *= scale;
    }
    return orb;
}

}  // namespace testutil
