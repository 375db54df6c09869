#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "pwmb/common.hpp"
#include "test_util.hpp"

using namespace pwmb;

TEST_CASE("cell volume and reciprocal basis") {
    CrystalCell cell = testutil::cubic_cell(5.0);
    CHECK(cell.volume() == doctest::Approx(125.0));
    const Mat3 b = cell.reciprocal();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double dot = b.col[i].dot(cell.lattice.col[j]);
            CHECK(dot == doctest::Approx(i == j ? 2.0 * kPi : 0.0).epsilon(1e-12));
        }
}

TEST_CASE("reciprocal basis of a triclinic cell") {
    CrystalCell cell;
    cell.lattice.col[0] = {4.0, 0.1, -0.2};
    cell.lattice.col[1] = {0.3, 5.0, 0.4};
    cell.lattice.col[2] = {-0.1, 0.2, 6.0};
    const Mat3 b = cell.reciprocal();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(b.col[i].dot(cell.lattice.col[j]) ==
                  doctest::Approx(i == j ? 2.0 * kPi : 0.0).epsilon(1e-12));
}

TEST_CASE("fractional coordinates and wrapping") {
    CrystalCell cell = testutil::cubic_cell(4.0);
    const Vec3 r{5.0, -1.0, 3.0};
    const Vec3 f = cell.to_fractional(r);
    CHECK(f.x == doctest::Approx(1.25));
    CHECK(f.y == doctest::Approx(-0.25));
    const Vec3 w = cell.wrap(r);
    CHECK(w.x == doctest::Approx(1.0));
    CHECK(w.y == doctest::Approx(3.0));
    CHECK(w.z == doctest::Approx(3.0));
}

TEST_CASE("minimum image distance") {
    CrystalCell cell = testutil::cubic_cell(10.0);
    CHECK(cell.min_image_distance({0.5, 0.0, 0.0}, {9.5, 0.0, 0.0}) ==
          doctest::Approx(1.0));
    CHECK(cell.min_image_distance({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}) ==
          doctest::Approx(0.0));
}

TEST_CASE("degenerate lattice rejected") {
    CrystalCell cell;
    cell.lattice.col[0] = {1.0, 0.0, 0.0};
    cell.lattice.col[1] = {2.0, 0.0, 0.0};
    cell.lattice.col[2] = {0.0, 0.0, 1.0};
    CHECK_THROWS_AS(cell.validate(), InputError);
}
