#include "rsmkit/normal.hpp"

#include <cmath>

#include "rsmkit/errors.hpp"

namespace rsm {

namespace {

double polynomial(const double* coeffs, int count, double r) {
  double value = coeffs[count - 1];
  for (int i = count - 2; i >= 0; --i) value = value * r + coeffs[i];
  return value;
}

// PPND16 coefficients (Wichura, Algorithm AS 241).
constexpr double kCentralNum[] = {
    3.3871328727963666080e0,  1.3314166789178437745e2, 1.9715909503065514427e3,
    1.3731693765509461125e4,  4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4,  2.5090809287301226727e3,
};
constexpr double kCentralDen[] = {
    1.0,                      4.2313330701600911252e1, 6.8718700749205790830e2,
    5.3941960214247511077e3,  2.1213794301586595867e4, 3.9307895800092710610e4,
    2.8729085735721942674e4,  5.2264952788528545610e3,
};
constexpr double kMiddleNum[] = {
    1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
    3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4,
};
constexpr double kMiddleDen[] = {
    1.0,                      2.05319162663775882187e0, 1.67638483018380384940e0,
    6.89767334985100004550e-1, 1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9,
};
constexpr double kTailNum[] = {
    6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
    2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7,
};
constexpr double kTailDen[] = {
    1.0,                      5.99832206555887937690e-1, 1.36929880922735805310e-1,
    1.48753612908506148525e-2, 7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15,
};

}  // namespace

double normal_quantile(double probability) {
  if (!(probability > 0.0 && probability < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantile probability must lie strictly in (0, 1)");
  }
  const double q = probability - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * polynomial(kCentralNum, 8, r) / polynomial(kCentralDen, 8, r);
  }
  double r = q < 0.0 ? probability : 1.0 - probability;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = polynomial(kMiddleNum, 8, r) / polynomial(kMiddleDen, 8, r);
  } else {
    r -= 5.0;
    value = polynomial(kTailNum, 8, r) / polynomial(kTailDen, 8, r);
  }
  return q < 0.0 ? -value : value;
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

NoiseStream::NoiseStream(std::uint64_t seed, std::uint64_t replication)
    : state_(mix(seed + kGolden * (replication + 1))) {}

std::uint64_t NoiseStream::next_bits() {
  state_ += kGolden;
  return mix(state_);
}

double NoiseStream::uniform() {
  return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::gaussian() { return normal_quantile(uniform()); }

}  // namespace rsm
