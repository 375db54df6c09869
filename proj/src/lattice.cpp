#include "pwmb/lattice.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "pwmb/pwio.hpp"

namespace pwmb {

ReciprocalBasis ReciprocalBasis::from_cell(const CrystalCell& cell, double e_cut_hartree) {
    if (e_cut_hartree <= 0.0) throw InputError("e_cut must be positive");
    ReciprocalBasis rb;
    rb.b_vectors = cell.reciprocal();
    rb.g_cut = std::sqrt(2.0 * e_cut_hartree);
    return rb;
}

std::vector<Miller> generate_g_sphere(const ReciprocalBasis& basis) {
    if (basis.g_cut <= 0.0) throw InputError("g_cut must be positive");
    // Conservative per-axis Miller bound: m_i = a_i.G / 2pi <= |a_i| g_cut / 2pi,
    // obtained via the dual basis. Recover |a_i| from b x b.
    const Mat3& b = basis.b_vectors;
    const double vol_b = b.det();
    std::array<Vec3, 3> a;
    a[0] = cross(b.col[1], b.col[2]) * (2.0 * kPi / vol_b);
    a[1] = cross(b.col[2], b.col[0]) * (2.0 * kPi / vol_b);
    a[2] = cross(b.col[0], b.col[1]) * (2.0 * kPi / vol_b);
    int mmax[3];
    for (int i = 0; i < 3; ++i)
        mmax[i] = int(std::floor(a[i].norm() * basis.g_cut / (2.0 * kPi))) + 1;

    const double cut2 = basis.g_cut * basis.g_cut * (1.0 + 1e-12);
    std::vector<std::pair<double, Miller>> found;
    for (int i = -mmax[0]; i <= mmax[0]; ++i)
        for (int j = -mmax[1]; j <= mmax[1]; ++j)
            for (int k = -mmax[2]; k <= mmax[2]; ++k) {
                const Miller m{i, j, k};
                const double g2 = basis.cartesian(m).norm2();
                if (g2 <= cut2) found.emplace_back(g2, m);
            }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return x.second < y.second;
    });
    std::vector<Miller> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(f.second);
    return out;
}

namespace {

int next_smooth(int n) {
    for (;; ++n) {
        int m = n;
        for (int p : {2, 3, 5, 7})
            while (m % p == 0) m /= p;
        if (m == 1) return n;
    }
}

}  // namespace

std::array<int, 3> fft_grid_dims(const CrystalCell& cell, double g_max) {
    std::array<int, 3> dims;
    for (int i = 0; i < 3; ++i) {
        const double bound = 2.0 * g_max * cell.lattice.col[i].norm() / (2.0 * kPi) + 1.0;
        dims[i] = next_smooth(std::max(2, int(std::ceil(bound))));
    }
    return dims;
}

void check_grid_dims(const CrystalCell& cell, const std::array<int, 3>& dims,
                     double g_max) {
    for (int i = 0; i < 3; ++i) {
        const int mmax = int(std::floor(g_max * cell.lattice.col[i].norm() / (2.0 * kPi) + 1e-9));
        if (dims[i] < 2 * mmax + 1)
            throw NumericalError("grid dimension " + std::to_string(i) + " = " +
                                 std::to_string(dims[i]) + " aliases momenta up to " +
                                 std::to_string(g_max) + " Bohr^-1 (need >= " +
                                 std::to_string(2 * mmax + 1) + ")");
    }
}

namespace {

std::mutex fftw_plan_mutex;

void run_fft(std::array<int, 3> dims, std::vector<cplx>& data, int sign) {
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);  // planner is not thread-safe
        plan = fftw_plan_dft_3d(dims[0], dims[1], dims[2],
                                reinterpret_cast<fftw_complex*>(data.data()),
                                reinterpret_cast<fftw_complex*>(data.data()), sign,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
}

}  // namespace

void fft_inverse(std::array<int, 3> dims, std::vector<cplx>& data) {
    run_fft(dims, data, FFTW_BACKWARD);  // sum_G c_G exp(+iG.r)
}

void fft_forward(std::array<int, 3> dims, std::vector<cplx>& data) {
    run_fft(dims, data, FFTW_FORWARD);
    const double inv_n = 1.0 / double(data.size());
    for (auto& v : data) v *= inv_n;
}

namespace {

std::size_t grid_slot(const std::array<int, 3>& dims, const Miller& m) {
    const int i = ((m[0] % dims[0]) + dims[0]) % dims[0];
    const int j = ((m[1] % dims[1]) + dims[1]) % dims[1];
    const int k = ((m[2] % dims[2]) + dims[2]) % dims[2];
    return (std::size_t(i) * dims[1] + j) * dims[2] + k;
}

}  // namespace

RealSpaceGrid orbital_to_real_space(const PlaneWaveOrbitalSet& orbitals, int t,
                                    const std::array<int, 3>& dims,
                                    const CrystalCell& cell) {
    check_grid_dims(cell, dims, orbitals.g_cut());
    RealSpaceGrid grid;
    grid.dims = dims;
    grid.cell = cell;
    grid.values.assign(std::size_t(dims[0]) * dims[1] * dims[2], cplx(0.0));
    for (int g = 0; g < orbitals.n_gvecs(); ++g)
        grid.values[grid_slot(dims, orbitals.g_vectors[g])] += orbitals.coeff(g, t);
    fft_inverse(dims, grid.values);
    const double inv_sqrt_v = 1.0 / std::sqrt(cell.volume());
    for (auto& v : grid.values) v *= inv_sqrt_v;
    return grid;
}

std::vector<cplx> pair_density_spectrum(const PlaneWaveOrbitalSet& orbitals, int u,
                                        int v, const std::array<int, 3>& dims,
                                        const CrystalCell& cell,
                                        const std::vector<Miller>& g_list) {
    check_grid_dims(cell, dims, 2.0 * orbitals.g_cut());
    RealSpaceGrid gu = orbital_to_real_space(orbitals, u, dims, cell);
    RealSpaceGrid gv = orbital_to_real_space(orbitals, v, dims, cell);
    std::vector<cplx>& rho = gu.values;
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] = std::conj(rho[i]) * gv.values[i];
    fft_forward(dims, rho);  // (1/N) sum_r rho e^{-iG.r} = (1/V) \int rho e^{-iG.r}
    std::vector<cplx> out(g_list.size());
    for (std::size_t i = 0; i < g_list.size(); ++i)
        out[i] = rho[grid_slot(dims, g_list[i])];
    return out;
}

}  // namespace pwmb
