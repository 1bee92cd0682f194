#include "wickwz/rng.hpp"

#include <cmath>

#include "wickwz/errors.hpp"

namespace wickwz {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t master_seed, uint64_t path_index) {
  return splitmix64(splitmix64(master_seed) ^ (path_index + 0x9e3779b97f4a7c15ULL));
}

namespace {

// Rational approximations from Wichura, "Algorithm AS 241: The Percentage
// Points of the Normal Distribution" (double-precision branch).
double ppnd16_central(double q) {
  // |q| <= 0.425
  const double r = 0.180625 - q * q;
  const double num = q * (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                               6.7265770927008700853e+4) *
                                  r +
                              4.5921953931549871457e+4) *
                                 r +
                             1.3731693765509461125e+4) *
                                r +
                            1.9715909503065514427e+3) *
                               r +
                           1.3314166789178437745e+2) *
                              r +
                          3.3871328727963666080e+0);
  const double den = (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                           3.9307895800092710610e+4) *
                              r +
                          2.1213794301586595867e+4) *
                             r +
                         5.3941960214247511077e+3) *
                            r +
                        6.8718700749205790830e+2) *
                           r +
                       4.2313330701600911252e+1) *
                          r +
                      1.0);
  return num / den;
}

double ppnd16_tail(double r) {
  // r = sqrt(-log(min(p, 1-p))), r > 1.6 here
  if (r <= 5.0) {
    const double s = r - 1.6;
    const double num = (((((((7.74545014278341407640e-4 * s + 2.27238449892691845833e-2) * s +
                             2.41780725177450611770e-1) *
                                s +
                            1.27045825245236838258e+0) *
                               s +
                           3.64784832476320460504e+0) *
                              s +
                          5.76949722146069140550e+0) *
                             s +
                         4.63033784615654529590e+0) *
                            s +
                        1.42343711074968357734e+0);
    const double den = (((((((1.05075007164441684324e-9 * s + 5.47593808499534494600e-4) * s +
                             1.51986665636164571966e-2) *
                                s +
                            1.48103976427480074590e-1) *
                               s +
                           6.89767334985100004550e-1) *
                              s +
                          1.67638483018380384940e+0) *
                             s +
                         2.05319162663775882187e+0) *
                            s +
                        1.0);
    return num / den;
  }
  const double s = r - 5.0;
  const double num = (((((((2.01033439929228813265e-7 * s + 2.71155556874348757815e-5) * s +
                           1.24266094738807843860e-3) *
                              s +
                          2.65321895265761230930e-2) *
                             s +
                         2.96560571828504891230e-1) *
                            s +
                        1.78482653991729133580e+0) *
                           s +
                       5.46378491116411436990e+0) *
                          s +
                      6.65790464350110377720e+0);
  const double den = (((((((2.04426310338993978564e-15 * s + 1.42151175831644588870e-7) * s +
                           1.84631831751005468180e-5) *
                              s +
                          7.86869131145613259100e-4) *
                             s +
                         1.48753612908506148525e-2) *
                            s +
                        1.36929880922735805310e-1) *
                           s +
                       5.99832206555887937690e-1) *
                          s +
                      1.0);
  return num / den;
}

}  // namespace

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) raise(Errc::out_of_range, "inverse_normal_cdf requires p in (0,1)");
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) return ppnd16_central(q);
  const double pp = (q < 0.0) ? p : 1.0 - p;
  const double r = std::sqrt(-std::log(pp));
  const double z = ppnd16_tail(r);
  return (q < 0.0) ? -z : z;
}

}  // namespace wickwz
