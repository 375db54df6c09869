#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pwmb/common.hpp"
#include "pwmb/lattice.hpp"

namespace pwmb {

struct PlaneWaveOrbitalSet {
    double e_cut = 0.0;                 // Hartree
    std::vector<Miller> g_vectors;      // full sphere after loading
    Mat3 b_vectors;                     // reciprocal basis, Bohr^-1
    // coefficients[t * n_gvecs + g], orbital-major
    std::vector<cplx> coefficients;
    std::vector<double> orbital_energies;  // Hartree
    int n_electrons = 0;
    bool gamma_only = false;

    int n_orbitals() const { return int(orbital_energies.size()); }
    int n_gvecs() const { return int(g_vectors.size()); }

    cplx coeff(int g, int t) const { return coefficients[std::size_t(t) * g_vectors.size() + g]; }
    cplx& coeff(int g, int t) { return coefficients[std::size_t(t) * g_vectors.size() + g]; }

    Vec3 g_cartesian(int g) const {
        const Miller& m = g_vectors[g];
        return b_vectors * Vec3{double(m[0]), double(m[1]), double(m[2])};
    }
    double g_cut() const { return std::sqrt(2.0 * e_cut); }
};

struct RadialProjector {
    int l = 0;                    // angular momentum
    std::vector<double> beta;     // beta_il(r) on the shared mesh
};

struct NormConservingPseudopotential {
    std::string element;
    double z_valence = 0.0;
    std::vector<double> r_grid;     // strictly increasing, Bohr
    std::vector<double> r_weights;  // quadrature weights for \int dr
    std::vector<double> v_local;    // Hartree
    std::vector<RadialProjector> projectors;
    // D_ij blocks per angular momentum channel, Hartree. d_blocks[l] is the
    // square matrix over projectors with that l (row-major); projector_index[l]
    // maps block rows back into `projectors`.
    std::map<int, std::vector<double>> d_blocks;
    std::map<int, std::vector<int>> projector_index;

    int max_l() const;
    void validate() const;

    double radial_integral(const std::vector<double>& f) const;  // sum f_i w_i
};

// Wavefunction interchange bundle: directory with manifest.json, gvecs.i32
// (n_gvecs x 3 int32 LE) and coeffs.c128 (n_orbitals x n_gvecs complex128,
// orbital-major).
std::pair<CrystalCell, PlaneWaveOrbitalSet> load_wavefunction_bundle(
    const std::filesystem::path& dir);

// Writes the canonical form: full sphere, G sorted by (|G|^2, lex), gamma_only
// false. Loading then writing again is byte-identical.
void write_bundle(const std::filesystem::path& dir, const CrystalCell& cell,
                  const PlaneWaveOrbitalSet& orbitals);

NormConservingPseudopotential load_pseudopotential(const std::filesystem::path& path);

}  // namespace pwmb
