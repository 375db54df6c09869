#include "pwmb/common.hpp"

namespace pwmb {

Mat3 CrystalCell::reciprocal() const {
    const Vec3& a1 = lattice.col[0];
    const Vec3& a2 = lattice.col[1];
    const Vec3& a3 = lattice.col[2];
    const double v = lattice.det();
    if (std::abs(v) < 1e-14) throw InputError("degenerate lattice: |det| ~ 0");
    Mat3 b;
    b.col[0] = cross(a2, a3) * (2.0 * kPi / v);
    b.col[1] = cross(a3, a1) * (2.0 * kPi / v);
    b.col[2] = cross(a1, a2) * (2.0 * kPi / v);
    return b;
}

Vec3 CrystalCell::to_fractional(const Vec3& r) const {
    const Mat3 b = reciprocal();
    return {b.col[0].dot(r) / (2.0 * kPi), b.col[1].dot(r) / (2.0 * kPi),
            b.col[2].dot(r) / (2.0 * kPi)};
}

Vec3 CrystalCell::wrap(const Vec3& r) const {
    Vec3 f = to_fractional(r);
    bool inside = true;
    for (int i = 0; i < 3; ++i) inside = inside && f[i] >= 0.0 && f[i] < 1.0;
    if (inside) return r;  // keep in-cell positions bitwise unchanged (idempotent)
    for (int i = 0; i < 3; ++i) {
        f[i] -= std::floor(f[i]);
        if (f[i] >= 1.0) f[i] = 0.0;  // guard against floor(1-eps) rounding
    }
    return lattice * f;
}

double CrystalCell::min_image_distance(const Vec3& a, const Vec3& b) const {
    Vec3 d = a - b;
    Vec3 f = to_fractional(d);
    for (int i = 0; i < 3; ++i) f[i] -= std::round(f[i]);
    double best = (lattice * f).norm();
    // Search neighbor images; the rounded image is not always minimal in skewed cells.
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) {
                Vec3 g{f.x + i, f.y + j, f.z + k};
                best = std::min(best, (lattice * g).norm());
            }
    return best;
}

void CrystalCell::validate() const {
    if (volume() <= 0.0 || !std::isfinite(volume()))
        throw InputError("cell volume must be positive");
}

}  // namespace pwmb
