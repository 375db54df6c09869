#pragma once

#include <vector>

#include "pwmb/common.hpp"

namespace pwmb {

struct EwaldParameters {
    double sigma = 1.0;        // Bohr^-2 splitting parameter
    int real_shell_count = 1;  // lattice sums truncated by whole max-norm shells
    int recip_shell_count = 1;
};

// Largest sigma on the geometric grid {2^k} with
//   sum_I 2 Z_I sqrt(sigma/pi) erfc(2 G_cut / sqrt(sigma)) <= 1e-7,
// plus shell counts whose outermost shell contributes < 1e-12 Ha.
EwaldParameters select_sigma(const CrystalCell& cell, const std::vector<double>& charges,
                             double g_cut);

// Ewald nuclear repulsion: real-space erfc sum, reciprocal sum over G != 0,
// self term, and charged-system term.
double nuclear_repulsion(const CrystalCell& cell, const std::vector<double>& charges,
                         const EwaldParameters& params);
double nuclear_repulsion_serial(const CrystalCell& cell, const std::vector<double>& charges,
                                const EwaldParameters& params);

// N_e * v_img with v_img the background-regularized lattice sum sum'_T 1/|T|.
double electron_self_energy(int n_electrons, const CrystalCell& cell,
                            const EwaldParameters& params);

}  // namespace pwmb
