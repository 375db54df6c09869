#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pwmb/common.hpp"
#include "pwmb/lattice.hpp"
#include "pwmb/pwio.hpp"

namespace pwmb {

// Hermitian matrix over KS band indices, Hartree.
using OneBodyMatrix = Eigen::MatrixXcd;

// Rank-4 tensor h_tuvw over band indices, Hartree. Only one element per orbit
// of the symmetry group {identity, swap, hermitian conjugate, both} is stored;
// the accessor reconstructs the rest exactly.
class TwoBodyTensor {
public:
    TwoBodyTensor() = default;
    explicit TwoBodyTensor(int n) : n_(n), data_(std::size_t(n) * n * n * n, cplx(0.0)) {}

    int dim() const { return n_; }

    cplx operator()(int t, int u, int v, int w) const {
        bool conj = false;
        const std::size_t idx = canonical_index(t, u, v, w, conj);
        return conj ? std::conj(data_[idx]) : data_[idx];
    }

    void set(int t, int u, int v, int w, cplx value) {
        bool conj = false;
        const std::size_t idx = canonical_index(t, u, v, w, conj);
        data_[idx] = conj ? std::conj(value) : value;
    }

    // True when (t,u,v,w) is the stored representative of its symmetry orbit.
    bool is_canonical(int t, int u, int v, int w) const {
        bool conj = false;
        return canonical_index(t, u, v, w, conj) == flat(t, u, v, w);
    }

    std::size_t n_unique() const;

private:
    std::size_t flat(int t, int u, int v, int w) const {
        return ((std::size_t(t) * n_ + u) * n_ + v) * n_ + w;
    }
    std::size_t canonical_index(int t, int u, int v, int w, bool& conj) const;

    int n_ = 0;
    std::vector<cplx> data_;
};

// T_tu = (1/2) sum_G conj(c_{G,t}) c_{G,u} G^2
OneBodyMatrix kinetic_matrix(const PlaneWaveOrbitalSet& orbitals);

// Radial sine transform int r (V_loc + Z erf(r)/r) sin(q r)/q dr; the q = 0
// value is int r^2 (V_loc + Z/r) dr.
double local_radial_transform(const NormConservingPseudopotential& pp, double q);

// <G1| V_loc^(I) |G2> with delta_g = G1 - G2 (Cartesian).
cplx local_pp_pw(const NormConservingPseudopotential& pp, const Vec3& r_atom,
                 const Vec3& delta_g, const CrystalCell& cell);

// F_il(x) = int r^2 beta_il(r) j_l(x r) dr for projector index ip.
double projector_form_factor(const NormConservingPseudopotential& pp, int ip, double x);

// <G1| V_nl^(I) |G2>
cplx nonlocal_pp_pw(const NormConservingPseudopotential& pp, const Vec3& r_atom,
                    const Vec3& g1, const Vec3& g2, const CrystalCell& cell);

// h_tu = T_tu + sum_I <psi_t| V_loc^(I) + V_nl^(I) |psi_u>; pps aligned with
// cell.atoms. The non-local part goes through per-atom projector vectors
// P_{ilm,t} so the cost is O(N_G N_proj N_orb).
OneBodyMatrix one_body_ks(const PlaneWaveOrbitalSet& orbitals, const CrystalCell& cell,
                          const std::vector<const NormConservingPseudopotential*>& pps);

// h_tuvw = 4 pi V sum_{G != 0} rho~_tw(-G) rho~_uv(G) / G^2 over the orbitals
// named by `indices` (tensor indices follow the order of `indices`).
TwoBodyTensor two_body_ks(const PlaneWaveOrbitalSet& orbitals, const CrystalCell& cell,
                          const std::vector<int>& indices);
TwoBodyTensor two_body_ks_serial(const PlaneWaveOrbitalSet& orbitals,
                                 const CrystalCell& cell,
                                 const std::vector<int>& indices);

}  // namespace pwmb
