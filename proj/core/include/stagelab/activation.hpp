#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace stagelab {

enum class ActivationKind { tanh, identity, custom };

/// Scalar activation sigma with derivatives up to third order.
///
/// Built-ins use closed forms; custom activations differentiate the supplied
/// function by central differences. Every activation is checked at
/// construction for sigma(0) = 0, sigma'(0) = 1, sigma''(0) = 0 (within 1e-8).
/// Immutable and cheap to copy.
class Activation {
 public:
  static Activation tanh();
  static Activation identity();
  /// Throws ValidationError when the tanh-like conditions at 0 fail.
  static Activation custom(std::string name, std::function<double(double)> fn,
                           double lipschitz_third);

  [[nodiscard]] ActivationKind kind() const noexcept;
  [[nodiscard]] std::string_view name() const noexcept;
  [[nodiscard]] bool is_odd() const noexcept;

  [[nodiscard]] double value(double z) const;
  [[nodiscard]] double d1(double z) const;
  [[nodiscard]] double d2(double z) const;
  [[nodiscard]] double d3(double z) const;

  /// C_L, the bound on |sigma'''| the activation advertises.
  [[nodiscard]] double lipschitz_third() const noexcept;

  /// Batched sigma(z) into `value`.
  void eval(std::span<const double> z, std::span<double> value) const;
  /// Batched sigma(z) and sigma'(z).
  void eval(std::span<const double> z, std::span<double> value, std::span<double> deriv) const;

 private:
  struct Impl;
  explicit Activation(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

struct ActivationReport {
  double value_at_zero = 0.0;
  double d1_at_zero = 0.0;
  double d2_at_zero = 0.0;
  double max_abs_d3 = 0.0;    // sampled over [-z_max, z_max]
  double lipschitz_third = 0.0;
  bool tanh_like = false;     // conditions at zero within 1e-8
  bool third_bounded = false;  // max_abs_d3 <= lipschitz_third
};

/// Samples |sigma'''| on a uniform grid of `samples` points over [-z_max, z_max].
[[nodiscard]] ActivationReport validate_activation(const Activation& act, double z_max,
                                                   int samples = 2001);

/// Looks up a built-in activation by name ("tanh", "identity").
[[nodiscard]] Activation activation_by_name(std::string_view name);

namespace detail {
/// tanh over a row; exposed for benchmarks and tests.
void tanh_row(std::span<const double> z, std::span<double> out);
}  // namespace detail

}  // namespace stagelab
