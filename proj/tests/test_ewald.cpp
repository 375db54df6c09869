#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pwmb/ewald.hpp"
#include "test_util.hpp"

using namespace pwmb;

namespace {

CrystalCell two_atom_cell() {
    CrystalCell cell = testutil::cubic_cell(8.0);
    Atom a;
    a.species = "A";
    a.position = {0.5, 1.0, 1.5};
    cell.atoms.push_back(a);
    a.species = "B";
    a.position = {4.1, 3.3, 2.2};
    cell.atoms.push_back(a);
    return cell;
}

// Evjen's method: charge-weighted cube summation for the rocksalt Madelung
// constant, independent of the Ewald machinery.
double evjen_madelung(int n_max) {
    double m = 0.0;
    for (int i = -n_max; i <= n_max; ++i)
        for (int j = -n_max; j <= n_max; ++j)
            for (int k = -n_max; k <= n_max; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                double w = 1.0;
                if (std::abs(i) == n_max) w *= 0.5;
                if (std::abs(j) == n_max) w *= 0.5;
                if (std::abs(k) == n_max) w *= 0.5;
                const double r = std::sqrt(double(i) * i + double(j) * j + double(k) * k);
                const double sign = ((i + j + k) % 2 == 0) ? 1.0 : -1.0;
                m += w * sign / r;
            }
    return -m;
}

}  // namespace

TEST_CASE("energy is invariant under the splitting parameter") {
    const CrystalCell cell = two_atom_cell();
    const std::vector<double> z{3.0, 5.0};
    const auto params = select_sigma(cell, z, 3.0);
    const double e0 = nuclear_repulsion(cell, z, params);
    for (double factor : {0.25, 0.5, 2.0}) {
        EwaldParameters p = params;
        p.sigma *= factor;
        CHECK(std::abs(nuclear_repulsion(cell, z, p) - e0) < 1e-8);
    }
}

TEST_CASE("rocksalt Madelung constant matches the Evjen oracle") {
    // conventional cube of side 2 with 8 alternating unit charges, nearest
    // neighbor distance 1
    CrystalCell cell = testutil::cubic_cell(2.0);
    std::vector<double> z;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                Atom a;
                a.species = (i + j + k) % 2 ? "Cl" : "Na";
                a.position = {double(i), double(j), double(k)};
                cell.atoms.push_back(a);
                z.push_back((i + j + k) % 2 ? -1.0 : 1.0);
            }
    EwaldParameters params;
    params.sigma = 2.0;
    params.real_shell_count = 4;
    params.recip_shell_count = 6;
    const double e = nuclear_repulsion(cell, z, params);
    // 4 ion pairs at unit separation: E = -4 M
    const double madelung = -e / 4.0;
    const double oracle = evjen_madelung(40);
    CHECK(std::abs(madelung - oracle) < 1e-5);
    CHECK(madelung == doctest::Approx(1.7475645946).epsilon(1e-6));
}

TEST_CASE("splitting parameter selection") {
    const CrystalCell cell = two_atom_cell();
    const std::vector<double> z{3.0, 5.0};
    const double g_cut = 2.5;
    const auto params = select_sigma(cell, z, g_cut);
    CHECK(params.sigma <= 1.0);
    // sigma sits on the geometric grid {2^-k}
    const double k = -std::log2(params.sigma);
    CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
    // the bound holds at sigma and fails one step up
    auto bound = [&](double sigma) {
        double s = 0.0;
        for (double zi : z)
            s += 2.0 * zi * std::sqrt(sigma / kPi) * std::erfc(2.0 * g_cut / std::sqrt(sigma));
        return s;
    };
    CHECK(bound(params.sigma) <= 1e-7);
    if (params.sigma < 1.0) CHECK(bound(2.0 * params.sigma) > 1e-7);
    CHECK(params.real_shell_count >= 1);
    CHECK(params.recip_shell_count >= 1);
    CHECK_THROWS_AS(select_sigma(cell, {3.0, -1.0}, g_cut), InputError);
    CHECK_THROWS_AS(select_sigma(cell, z, 0.0), InputError);
}

TEST_CASE("parallel and serial sums agree bitwise") {
    const CrystalCell cell = two_atom_cell();
    const std::vector<double> z{3.0, 5.0};
    const auto params = select_sigma(cell, z, 3.0);
    CHECK(nuclear_repulsion(cell, z, params) == nuclear_repulsion_serial(cell, z, params));
}

TEST_CASE("electron self energy") {
    const CrystalCell cell = testutil::cubic_cell(9.0);
    EwaldParameters params;
    params.sigma = 0.5;
    const double e1 = electron_self_energy(1, cell, params);
    // background-regularized lattice sum for a cubic cell: -2.8372974794/a
    CHECK(e1 == doctest::Approx(-2.8372974794 / 9.0).epsilon(1e-8));
    CHECK(electron_self_energy(4, cell, params) == doctest::Approx(4.0 * e1));
    CHECK(electron_self_energy(0, cell, params) == 0.0);
    CHECK_THROWS_AS(electron_self_energy(-1, cell, params), InputError);
}

TEST_CASE("coincident nuclei are reported") {
    CrystalCell cell = testutil::cubic_cell(6.0);
    Atom a;
    a.species = "A";
    a.position = {1.0, 1.0, 1.0};
    cell.atoms.push_back(a);
    cell.atoms.push_back(a);
    EwaldParameters params;
    CHECK_THROWS_AS(nuclear_repulsion(cell, {1.0, 1.0}, params), NumericalError);
}
