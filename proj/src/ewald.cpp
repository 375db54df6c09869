#include "pwmb/ewald.hpp"

#include <algorithm>
#include <complex>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pwmb {

namespace {

double sigma_bound(const std::vector<double>& charges, double g_cut, double sigma) {
    double s = 0.0;
    for (double z : charges)
        s += 2.0 * z * std::sqrt(sigma / kPi) * std::erfc(2.0 * g_cut / std::sqrt(sigma));
    return s;
}

// Real-space erfc sum over max-norm lattice shells. Per-atom partials are kept
// so parallel and serial execution reduce in the same order.
double real_space_sum(const CrystalCell& cell, const std::vector<Vec3>& pos,
                      const std::vector<double>& charges, double sigma, int min_shells,
                      int* shells_used, bool parallel) {
    const int n = int(pos.size());
    const double sqrt_sigma = std::sqrt(sigma);
    double total = 0.0;
    int shell = 0;
    for (;; ++shell) {
        std::vector<double> partial(n, 0.0);
        int bad_i = -1, bad_j = -1;  // exceptions may not leave the parallel region
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int ti = -shell; ti <= shell; ++ti)
                for (int tj = -shell; tj <= shell; ++tj)
                    for (int tk = -shell; tk <= shell; ++tk) {
                        if (std::max({std::abs(ti), std::abs(tj), std::abs(tk)}) != shell)
                            continue;
                        const Vec3 t = cell.lattice * Vec3{double(ti), double(tj), double(tk)};
                        for (int j = 0; j < n; ++j) {
                            if (shell == 0 && ti == 0 && tj == 0 && tk == 0 && i == j) continue;
                            const double r = (pos[i] - pos[j] - t).norm();
                            if (r < 1e-6) {
#ifdef _OPENMP
#pragma omp critical
#endif
                                {
                                    bad_i = i;
                                    bad_j = j;
                                }
                                continue;
                            }
                            acc += 0.5 * charges[i] * charges[j] * std::erfc(sqrt_sigma * r) / r;
                        }
                    }
            partial[i] = acc;
        }
        if (bad_i >= 0)
            throw NumericalError("coincident nuclei: atoms " + std::to_string(bad_i) +
                                 " and " + std::to_string(bad_j));
        double shell_sum = 0.0;
        for (double p : partial) shell_sum += p;
        total += shell_sum;
        if (shell >= min_shells && shell >= 1 && std::abs(shell_sum) < 1e-12) break;
        if (shell > 400)
            throw NumericalError("Ewald real-space sum did not converge");
    }
    if (shells_used) *shells_used = shell;
    return total;
}

double reciprocal_sum(const CrystalCell& cell, const std::vector<Vec3>& pos,
                      const std::vector<double>& charges, double sigma, int min_shells,
                      int* shells_used, bool parallel) {
    const Mat3 b = cell.reciprocal();
    const double pref = 2.0 * kPi / cell.volume();
    double total = 0.0;
    int shell = 1;  // G = 0 excluded
    for (;; ++shell) {
        std::vector<double> ring;
        std::vector<std::array<int, 3>> members;
        for (int i = -shell; i <= shell; ++i)
            for (int j = -shell; j <= shell; ++j)
                for (int k = -shell; k <= shell; ++k)
                    if (std::max({std::abs(i), std::abs(j), std::abs(k)}) == shell)
                        members.push_back({i, j, k});
        ring.assign(members.size(), 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (int m = 0; m < int(members.size()); ++m) {
            const auto& mi = members[m];
            const Vec3 g = b * Vec3{double(mi[0]), double(mi[1]), double(mi[2])};
            const double g2 = g.norm2();
            cplx s(0.0, 0.0);
            for (std::size_t a = 0; a < pos.size(); ++a)
                s += charges[a] * std::exp(cplx(0.0, g.dot(pos[a])));
            ring[m] = pref * std::norm(s) / g2 * std::exp(-g2 / (4.0 * sigma));
        }
        double shell_sum = 0.0;
        for (double r : ring) shell_sum += r;
        total += shell_sum;
        if (shell >= min_shells && std::abs(shell_sum) < 1e-12) break;
        if (shell > 400)
            throw NumericalError("Ewald reciprocal sum did not converge");
    }
    if (shells_used) *shells_used = shell;
    return total;
}

double ewald_energy(const CrystalCell& cell, const std::vector<Vec3>& pos,
                    const std::vector<double>& charges, const EwaldParameters& params,
                    bool parallel) {
    double z_sum = 0.0, z2_sum = 0.0;
    for (double z : charges) {
        z_sum += z;
        z2_sum += z * z;
    }
    const double e_real = real_space_sum(cell, pos, charges, params.sigma,
                                         params.real_shell_count, nullptr, parallel);
    const double e_recip = reciprocal_sum(cell, pos, charges, params.sigma,
                                          params.recip_shell_count, nullptr, parallel);
    const double e_self = -std::sqrt(params.sigma / kPi) * z2_sum;
    const double e_charged = -kPi / (2.0 * cell.volume() * params.sigma) * z_sum * z_sum;
    return e_real + e_recip + e_self + e_charged;
}

}  // namespace

EwaldParameters select_sigma(const CrystalCell& cell, const std::vector<double>& charges,
                             double g_cut) {
    if (g_cut <= 0.0) throw InputError("select_sigma: g_cut must be positive");
    for (double z : charges)
        if (z <= 0.0) throw InputError("select_sigma: charges must be positive");
    EwaldParameters params;
    params.sigma = 1.0;
    int halvings = 0;
    while (sigma_bound(charges, g_cut, params.sigma) > 1e-7) {
        params.sigma *= 0.5;
        if (++halvings > 60)
            throw NumericalError("select_sigma: no sigma satisfies the cutoff bound "
                                 "after 60 halvings (pathological cell)");
    }
    std::vector<Vec3> pos;
    for (const auto& a : cell.atoms) pos.push_back(a.position);
    if (pos.empty()) pos.push_back({0.0, 0.0, 0.0});
    std::vector<double> z = charges;
    z.resize(pos.size(), 1.0);
    real_space_sum(cell, pos, z, params.sigma, 1, &params.real_shell_count, false);
    reciprocal_sum(cell, pos, z, params.sigma, 1, &params.recip_shell_count, false);
    return params;
}

double nuclear_repulsion(const CrystalCell& cell, const std::vector<double>& charges,
                         const EwaldParameters& params) {
    if (charges.size() != cell.atoms.size())
        throw InputError("nuclear_repulsion: one charge per atom required");
    std::vector<Vec3> pos;
    for (const auto& a : cell.atoms) pos.push_back(a.position);
    return ewald_energy(cell, pos, charges, params, true);
}

double nuclear_repulsion_serial(const CrystalCell& cell, const std::vector<double>& charges,
                                const EwaldParameters& params) {
    if (charges.size() != cell.atoms.size())
        throw InputError("nuclear_repulsion: one charge per atom required");
    std::vector<Vec3> pos;
    for (const auto& a : cell.atoms) pos.push_back(a.position);
    return ewald_energy(cell, pos, charges, params, false);
}

double electron_self_energy(int n_electrons, const CrystalCell& cell,
                            const EwaldParameters& params) {
    if (n_electrons < 0) throw InputError("electron count must be non-negative");
    if (n_electrons == 0) return 0.0;
    // v_img = sum'_T 1/|T| regularized by the neutralizing background; equals
    // twice the Ewald energy of a single unit charge in the same cell.
    const std::vector<Vec3> pos{{0.0, 0.0, 0.0}};
    const std::vector<double> unit{1.0};
    const double v_img = 2.0 * ewald_energy(cell, pos, unit, params, true);
    return double(n_electrons) * v_img;
}

}  // namespace pwmb
