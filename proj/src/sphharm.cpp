#include "pwmb/sphharm.hpp"

namespace pwmb {

namespace {

// Associated Legendre P_l^m(x) for m >= 0, Condon-Shortley phase included.
double assoc_legendre(int l, int m, double x) {
    double pmm = 1.0;
    if (m > 0) {
        const double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
        double fact = 1.0;
        for (int i = 1; i <= m; ++i) {
            pmm *= -fact * somx2;
            fact += 2.0;
        }
    }
    if (l == m) return pmm;
    double pmmp1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pmmp1;
    double pll = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / double(ll - m);
        pmm = pmmp1;
        pmmp1 = pll;
    }
    return pll;
}

}  // namespace

cplx spherical_harmonic(int l, int m, const Vec3& v) {
    if (l < 0 || std::abs(m) > l) throw std::invalid_argument("invalid (l, m)");
    const double r = v.norm();
    if (r < 1e-300) return l == 0 ? cplx(1.0 / std::sqrt(4.0 * kPi)) : cplx(0.0);
    if (l == 0) return cplx(1.0 / std::sqrt(4.0 * kPi));
    const double cos_theta = v.z / r;
    const double phi = std::atan2(v.y, v.x);
    const int am = std::abs(m);
    double norm = (2.0 * l + 1.0) / (4.0 * kPi);
    for (int k = l - am + 1; k <= l + am; ++k) norm /= double(k);
    const double plm = assoc_legendre(l, am, cos_theta);
    cplx y = std::sqrt(norm) * plm * std::exp(cplx(0.0, am * phi));
    if (m < 0) y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
    return y;
}

double spherical_bessel(int l, double x) {
    if (l < 0) throw std::invalid_argument("spherical_bessel: l >= 0 required");
    if (x < 0.0) return (l % 2 ? -1.0 : 1.0) * spherical_bessel(l, -x);
    if (x < 1e-2) {
        // j_l(x) = x^l/(2l+1)!! [1 - x^2/(2(2l+3)) + x^4/(8(2l+3)(2l+5))]
        double dfact = 1.0;
        for (int k = 2 * l + 1; k > 1; k -= 2) dfact *= k;
        const double x2 = x * x;
        double xl = 1.0;
        for (int k = 0; k < l; ++k) xl *= x;
        return xl / dfact *
               (1.0 - x2 / (2.0 * (2.0 * l + 3.0)) +
                x2 * x2 / (8.0 * (2.0 * l + 3.0) * (2.0 * l + 5.0)));
    }
    const double j0 = std::sin(x) / x;
    if (l == 0) return j0;
    const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
    if (l == 1) return j1;
    if (x > double(l)) {
        // upward recurrence, stable for x > l
        double jm = j0, jc = j1;
        for (int k = 1; k < l; ++k) {
            const double jn = (2.0 * k + 1.0) / x * jc - jm;
            jm = jc;
            jc = jn;
        }
        return jc;
    }
    // downward recurrence from a start order well above l, normalized by j0
    const int start = l + int(std::sqrt(40.0 * l)) + 20;
    double jp = 0.0, jc = 1e-30, target = 0.0;
    for (int k = start; k >= 0; --k) {
        const double jm = (2.0 * k + 3.0) / x * jc - jp;
        jp = jc;
        jc = jm;
        if (k == l) target = jc;
        if (std::abs(jc) > 1e250) {  // rescale to avoid overflow
            jp /= 1e250;
            jc /= 1e250;
            target /= 1e250;
        }
    }
    return target * j0 / jc;
}

}  // namespace pwmb
