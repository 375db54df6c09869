#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "pwmb/matelems.hpp"

namespace pwmb {

// Partition of an orbital index universe into doubly occupied environment
// orbitals and active orbitals.
struct ActiveSpaceSpec {
    std::vector<int> frozen;
    std::vector<int> active;
    int n_active_electrons = 0;

    void validate(int n_electrons_total) const;
};

struct ActiveSpaceHamiltonian {
    int n_active = 0;
    int n_electrons = 0;   // electrons in the active space
    double e_const = 0.0;  // E_nn + E_e-self + E_frozen, Hartree
    OneBodyMatrix h_eff;   // h + g over active indices
    TwoBodyTensor h4;      // restricted to active indices
};

// E_frozen = 2 sum_a h_aa + sum_ab (2 h_abba - h_abab)
double frozen_core_energy(const OneBodyMatrix& h, const TwoBodyTensor& h4,
                          const std::vector<int>& frozen);

// g_tu = sum_a (2 h_taau - h_taua) over active indices
OneBodyMatrix frozen_core_potential(const TwoBodyTensor& h4, const std::vector<int>& frozen,
                                    const std::vector<int>& active);

ActiveSpaceHamiltonian assemble_hamiltonian(const OneBodyMatrix& h, const TwoBodyTensor& h4,
                                            double e_nn, double e_self,
                                            const ActiveSpaceSpec& spec);

// Spin-polarized reduction. h4[s][t] holds h_{tuvw,st} where spin s rides on
// the (t,w) pair and spin t on (u,v); spin 0 = up, 1 = down.
//   E_frozen = 1/2 sum_{ab,s} [(sum_t h_abba,st) - h_abab,ss] + sum_{a,s} h_aa,s
//   g_tu,s   = sum_b [(sum_t h_tbbu,st) - h_tbub,ss]
struct SpinResolvedFrozenCore {
    double e_frozen = 0.0;
    std::array<OneBodyMatrix, 2> g;  // over active indices, per spin
};
SpinResolvedFrozenCore spin_resolved_frozen_core(
    const std::array<OneBodyMatrix, 2>& h,
    const std::array<std::array<TwoBodyTensor, 2>, 2>& h4,
    const std::vector<int>& frozen, const std::vector<int>& active);

// Dump format: hamiltonian.json {n_active, n_electrons, e_const} next to
// h_eff.c128 (row-major complex128) and h4.bin (records of four int32 indices
// plus one complex128 per stored unique element).
void write_hamiltonian(const std::filesystem::path& dir, const ActiveSpaceHamiltonian& ham);
ActiveSpaceHamiltonian load_hamiltonian(const std::filesystem::path& dir);

}  // namespace pwmb
