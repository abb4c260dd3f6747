#include "stagelab/activation.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <Eigen/Core>

#include "stagelab/error.hpp"

namespace stagelab {
namespace {

// Cephes rational form, relative error ~2.5e-16 on |z| < 0.625.
constexpr double kRationalLimit = 0.625;
constexpr double kP0 = -9.64399179425052238628e-1;
constexpr double kP1 = -9.92877231001918586564e1;
constexpr double kP2 = -1.61468768441708447952e3;
constexpr double kQ0 = 1.12811678491632931402e2;
constexpr double kQ1 = 2.23548839060100448583e3;
constexpr double kQ2 = 4.84406305325125486048e3;

// Odd polynomial on |z| < 0.1: tanh z = z + z s g(s), s = z^2, g interpolated
// at Chebyshev nodes in s. Relative error ~1.1e-16.
constexpr double kPolyLimit = 0.1;
constexpr double kG0 = -0.3333333333333333;
constexpr double kG1 = 0.13333333333332828;
constexpr double kG2 = -0.053968253962352775;
constexpr double kG3 = 0.021869486016795843;
constexpr double kG4 = -0.0088627490936459;
constexpr double kG5 = 0.0035487828737493614;

inline double tanh_poly(double z) {
  const double s = z * z;
  const double g = ((((kG5 * s + kG4) * s + kG3) * s + kG2) * s + kG1) * s + kG0;
  return z + z * s * g;
}

inline double tanh_rational(double z) {
  const double s = z * z;
  const double num = (kP0 * s + kP1) * s + kP2;
  const double den = ((s + kQ0) * s + kQ1) * s + kQ2;
  return z + z * s * (num / den);
}

double central_d1(const std::function<double(double)>& f, double z) {
  const double h = 1e-5;
  return (f(z + h) - f(z - h)) / (2.0 * h);
}

double central_d2(const std::function<double(double)>& f, double z) {
  const double h = 1e-4;
  return (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
}

double central_d3(const std::function<double(double)>& f, double z) {
  const double h = 1e-3;
  return (f(z + 2 * h) - 2.0 * f(z + h) + 2.0 * f(z - h) - f(z - 2 * h)) / (2.0 * h * h * h);
}

}  // namespace

namespace detail {

void tanh_row(std::span<const double> z, std::span<double> out) {
  const std::size_t n = z.size();
  const double peak =
      n == 0 ? 0.0
             : Eigen::Map<const Eigen::ArrayXd>(z.data(), static_cast<Eigen::Index>(n)).abs().maxCoeff();
  if (peak < kPolyLimit) {
    for (std::size_t s = 0; s < n; ++s) out[s] = tanh_poly(z[s]);
  } else if (peak < kRationalLimit) {
    for (std::size_t s = 0; s < n; ++s) out[s] = tanh_rational(z[s]);
  } else {
    for (std::size_t s = 0; s < n; ++s) out[s] = std::tanh(z[s]);
  }
}

}  // namespace detail

struct Activation::Impl {
  ActivationKind kind;
  std::string name;
  std::function<double(double)> fn;  // custom only
  double lipschitz_third;
  bool odd;
};

Activation::Activation(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

Activation Activation::tanh() {
  static const auto impl = std::make_shared<const Impl>(
      Impl{ActivationKind::tanh, "tanh", {}, 2.0, true});
  return Activation(impl);
}

Activation Activation::identity() {
  static const auto impl = std::make_shared<const Impl>(
      Impl{ActivationKind::identity, "identity", {}, 0.0, true});
  return Activation(impl);
}

Activation Activation::custom(std::string name, std::function<double(double)> fn,
                              double lipschitz_third) {
  if (!fn) throw ValidationError("custom activation: empty function");
  if (!(lipschitz_third >= 0.0) || !std::isfinite(lipschitz_third)) {
    throw ValidationError("custom activation: C_L must be finite and nonnegative");
  }
  const double v0 = fn(0.0);
  const double d1 = central_d1(fn, 0.0);
  const double d2 = central_d2(fn, 0.0);
  constexpr double tol = 1e-8;
  if (std::abs(v0) > tol || std::abs(d1 - 1.0) > tol || std::abs(d2) > tol) {
    throw ValidationError("custom activation '" + name +
                          "' is not tanh-like: need sigma(0)=0, sigma'(0)=1, sigma''(0)=0");
  }
  bool odd = true;
  for (double z : {0.1, 0.5, 1.0, 2.5}) {
    const double plus = fn(z);
    const double minus = fn(-z);
    if (std::abs(plus + minus) > 1e-14 * std::max(1.0, std::abs(plus))) odd = false;
  }
  return Activation(std::make_shared<const Impl>(
      Impl{ActivationKind::custom, std::move(name), std::move(fn), lipschitz_third, odd}));
}

ActivationKind Activation::kind() const noexcept { return impl_->kind; }
std::string_view Activation::name() const noexcept { return impl_->name; }
bool Activation::is_odd() const noexcept { return impl_->odd; }
double Activation::lipschitz_third() const noexcept { return impl_->lipschitz_third; }

double Activation::value(double z) const {
  switch (impl_->kind) {
    case ActivationKind::tanh:
      return std::tanh(z);
    case ActivationKind::identity:
      return z;
    case ActivationKind::custom:
      break;
  }
  return impl_->fn(z);
}

double Activation::d1(double z) const {
  switch (impl_->kind) {
    case ActivationKind::tanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case ActivationKind::identity:
      return 1.0;
    case ActivationKind::custom:
      break;
  }
  return central_d1(impl_->fn, z);
}

double Activation::d2(double z) const {
  switch (impl_->kind) {
    case ActivationKind::tanh: {
      const double t = std::tanh(z);
      return -2.0 * t * (1.0 - t * t);
    }
    case ActivationKind::identity:
      return 0.0;
    case ActivationKind::custom:
      break;
  }
  return central_d2(impl_->fn, z);
}

double Activation::d3(double z) const {
  switch (impl_->kind) {
    case ActivationKind::tanh: {
      const double t2 = std::tanh(z) * std::tanh(z);
      return -2.0 * (1.0 - t2) * (1.0 - 3.0 * t2);
    }
    case ActivationKind::identity:
      return 0.0;
    case ActivationKind::custom:
      break;
  }
  return central_d3(impl_->fn, z);
}

void Activation::eval(std::span<const double> z, std::span<double> value) const {
  switch (impl_->kind) {
    case ActivationKind::tanh:
      detail::tanh_row(z, value);
      return;
    case ActivationKind::identity:
      std::copy(z.begin(), z.end(), value.begin());
      return;
    case ActivationKind::custom:
      for (std::size_t s = 0; s < z.size(); ++s) value[s] = impl_->fn(z[s]);
      return;
  }
}

void Activation::eval(std::span<const double> z, std::span<double> value,
                      std::span<double> deriv) const {
  switch (impl_->kind) {
    case ActivationKind::tanh:
      detail::tanh_row(z, value);
      for (std::size_t s = 0; s < z.size(); ++s) deriv[s] = 1.0 - value[s] * value[s];
      return;
    case ActivationKind::identity:
      std::copy(z.begin(), z.end(), value.begin());
      std::fill(deriv.begin(), deriv.end(), 1.0);
      return;
    case ActivationKind::custom:
      for (std::size_t s = 0; s < z.size(); ++s) {
        value[s] = impl_->fn(z[s]);
        deriv[s] = central_d1(impl_->fn, z[s]);
      }
      return;
  }
}

ActivationReport validate_activation(const Activation& act, double z_max, int samples) {
  if (!(z_max > 0.0) || samples < 2) throw ValidationError("validate_activation: bad grid");
  ActivationReport report;
  report.value_at_zero = act.value(0.0);
  report.d1_at_zero = act.d1(0.0);
  report.d2_at_zero = act.d2(0.0);
  report.lipschitz_third = act.lipschitz_third();
  for (int i = 0; i < samples; ++i) {
    const double z = -z_max + 2.0 * z_max * i / (samples - 1);
    report.max_abs_d3 = std::max(report.max_abs_d3, std::abs(act.d3(z)));
  }
  constexpr double tol = 1e-8;
  report.tanh_like = std::abs(report.value_at_zero) <= tol &&
                     std::abs(report.d1_at_zero - 1.0) <= tol && std::abs(report.d2_at_zero) <= tol;
  // FD noise on custom activations sits well below 1e-6.
  report.third_bounded = report.max_abs_d3 <= report.lipschitz_third + 1e-6;
  return report;
}

Activation activation_by_name(std::string_view name) {
  if (name == "tanh") return Activation::tanh();
  if (name == "identity") return Activation::identity();
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

}  // namespace stagelab
