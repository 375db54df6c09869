#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pwmb/common.hpp"

namespace pwmb {

using Miller = std::array<int, 3>;

struct ReciprocalBasis {
    Mat3 b_vectors;  // columns b1,b2,b3 in Bohr^-1
    double g_cut = 0.0;

    static ReciprocalBasis from_cell(const CrystalCell& cell, double e_cut_hartree);

    Vec3 cartesian(const Miller& m) const {
        return b_vectors * Vec3{double(m[0]), double(m[1]), double(m[2])};
    }
};

// All Miller triples with |G| <= g_cut, sorted by (|G|^2, then lexicographic index).
std::vector<Miller> generate_g_sphere(const ReciprocalBasis& basis);

struct PlaneWaveOrbitalSet;  // pwio.hpp

struct RealSpaceGrid {
    std::array<int, 3> dims{0, 0, 0};
    std::vector<cplx> values;  // index = (i*n2 + j)*n3 + k
    CrystalCell cell;

    std::size_t size() const {
        return std::size_t(dims[0]) * dims[1] * dims[2];
    }
    double point_weight() const { return cell.volume() / double(size()); }

    std::size_t index(int i, int j, int k) const {
        return (std::size_t(i) * dims[1] + j) * dims[2] + k;
    }
    Vec3 point(int i, int j, int k) const {
        return cell.lattice * Vec3{double(i) / dims[0], double(j) / dims[1],
                                   double(k) / dims[2]};
    }
};

// Smallest FFT-friendly (2,3,5,7-smooth) dims covering momenta up to g_max
// on each axis: n_i >= 2*g_max*|a_i|/(2pi) + 1.
std::array<int, 3> fft_grid_dims(const CrystalCell& cell, double g_max);

// Check that dims can represent all Miller indices of a sphere of radius g_max
// without aliasing; throws NumericalError otherwise.
void check_grid_dims(const CrystalCell& cell, const std::array<int, 3>& dims,
                     double g_max);

// psi_t(r) = (1/sqrt(V)) sum_G c_{G,t} exp(i G.r) sampled on the grid.
RealSpaceGrid orbital_to_real_space(const PlaneWaveOrbitalSet& orbitals, int t,
                                    const std::array<int, 3>& dims,
                                    const CrystalCell& cell);

// Unnormalized in-place FFTs on a RealSpaceGrid layout; forward applies
// exp(-i G.r) and divides by N so that forward(inverse(x)) == x.
void fft_forward(std::array<int, 3> dims, std::vector<cplx>& data);
void fft_inverse(std::array<int, 3> dims, std::vector<cplx>& data);

// Fourier coefficients of the pair density rho_uv(r) = conj(psi_u) psi_v on
// the doubled sphere (|G| <= 2 g_cut), ordered like `g_list`:
//   rho~_uv(G) = (1/V) \int rho_uv e^{-iG.r} dr.
std::vector<cplx> pair_density_spectrum(const PlaneWaveOrbitalSet& orbitals, int u,
                                        int v, const std::array<int, 3>& dims,
                                        const CrystalCell& cell,
                                        const std::vector<Miller>& g_list);

}  // namespace pwmb
