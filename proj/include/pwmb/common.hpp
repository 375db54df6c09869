#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwmb {

using cplx = std::complex<double>;

// Errors in external inputs (bad files, bad config). CLI exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failures (non-convergence, aliasing, unresolved basins). CLI exit code 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return (&x)[i]; }
    double operator[](int i) const { return (&x)[i]; }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
};

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// 3x3 matrix stored column-major: columns are lattice vectors a1,a2,a3.
struct Mat3 {
    std::array<Vec3, 3> col;

    Vec3 operator*(const Vec3& v) const {
        return col[0] * v.x + col[1] * v.y + col[2] * v.z;
    }
    double det() const { return col[0].dot(cross(col[1], col[2])); }
};

struct Atom {
    std::string species;
    Vec3 position;      // Bohr, Cartesian
    std::string upf;    // pseudopotential file name
};

struct CrystalCell {
    Mat3 lattice;            // columns a1,a2,a3 in Bohr
    std::vector<Atom> atoms;

    double volume() const { return std::abs(lattice.det()); }

    // Reciprocal basis columns b_i with b_i . a_j = 2 pi delta_ij.
    Mat3 reciprocal() const;

    // Cartesian -> fractional coordinates.
    Vec3 to_fractional(const Vec3& r) const;

    // Wrap a Cartesian position into the cell ([0,1)^3 fractional).
    Vec3 wrap(const Vec3& r) const;

    // Minimum-image distance between two Cartesian positions.
    double min_image_distance(const Vec3& a, const Vec3& b) const;

    void validate() const;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kRydbergToHartree = 0.5;
constexpr double kEvToHartree = 1.0 / 27.211386245988;

}  // namespace pwmb
