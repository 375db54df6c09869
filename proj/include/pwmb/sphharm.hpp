#pragma once

#include "pwmb/common.hpp"

namespace pwmb {

// Complex spherical harmonic Y_lm with Condon-Shortley phase, evaluated at the
// direction of v. For v ~ 0 the direction is undefined: Y_00 is returned for
// l = 0 and 0 for l >= 1 (the only combination that appears at G = 0).
cplx spherical_harmonic(int l, int m, const Vec3& v);

// Spherical Bessel function j_l(x); series expansion for small x, upward
// recurrence for x > l, downward (Miller) recurrence otherwise.
double spherical_bessel(int l, double x);

}  // namespace pwmb
