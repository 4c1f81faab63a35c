// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Orientation-preserving circle homeomorphisms represented by their
// degree-one lifts. The circle is R/Z parametrized by [0, 1).
#pragma once

#include <cmath>
#include <memory>
#include <utility>
#include <vector>

namespace cifs {

inline constexpr double kTolInv = 1e-12;
inline constexpr int kMaxInverseIter = 200;
inline constexpr double kTolNeutral = 1e-6;

/// Reduce a real number to [0, 1).
inline double wrap01(double x) {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

/// Reduce to [-1/2, 1/2).
inline double wrap_signed(double x) { return wrap01(x + 0.5) - 0.5; }

/// Circle metric d(x, y) = min(|x - y|, 1 - |x - y|).
inline double circle_distance(double x, double y) { return std::abs(wrap_signed(x - y)); }

/// A point of R/Z; every construction reduces mod 1.
class CirclePoint {
 public:
  CirclePoint(double x = 0.0) : value_(wrap01(x)) {}  // NOLINT(google-explicit-constructor)
  double value() const { return value_; }
  friend bool operator==(CirclePoint, CirclePoint) = default;

 private:
  double value_;
};

inline double distance(CirclePoint x, CirclePoint y) { return circle_distance(x.value(), y.value()); }

/// Global bounds on the first and second derivative of a lift.
struct DerivBounds {
  double min_d1 = 1.0;
  double max_d1 = 1.0;
  double max_d2 = 0.0;

  /// Bounds of `outer ∘ inner`.
  static DerivBounds compose(const DerivBounds& outer, const DerivBounds& inner);
  DerivBounds inverted() const;
};

enum class FixedPointStability { Attracting, Repelling, Neutral };
const char* to_string(FixedPointStability s);
FixedPointStability classify_multiplier(double multiplier, double tol_neutral = kTolNeutral);

struct FixedPoint {
  CirclePoint point;
  double derivative;
  FixedPointStability stability;
};

class LiftMap {
 public:
  enum class Kind { Rotation, Sine, Composition, Power, Inverse };

  static LiftMap identity() { return rotation(0.0); }
  static LiftMap rotation(double alpha);
  /// x + a + b/(2 pi n) sin(2 pi (n x + phase)), |b| < 1, n >= 1.
  static LiftMap sine(double a, double b, int freq = 1, double phase = 0.0);
  /// maps[0] is outermost: composition({f, g}) = f ∘ g.
  static LiftMap composition(std::vector<LiftMap> maps);
  static LiftMap power(const LiftMap& base, long exponent);
  static LiftMap inverse(const LiftMap& base);

  Kind kind() const;
  bool is_rotation() const { return kind() == Kind::Rotation; }

  // Parameters; valid only for the matching kind.
  double alpha() const;
  double sine_a() const;
  double sine_b() const;
  int sine_freq() const;
  double sine_phase() const;
  const std::vector<LiftMap>& parts() const;
  const LiftMap& base() const;
  long exponent() const;

  /// The lift F on R; F(x + 1) = F(x) + 1.
  double lift(double x) const;
  std::pair<double, double> lift_deriv(double x) const;
  /// Solve F(x) = y on R.
  double inverse_lift(double y) const;

  CirclePoint operator()(CirclePoint x) const;
  double deriv(CirclePoint x) const;
  /// Image point and derivative in one pass.
  std::pair<CirclePoint, double> eval_deriv(CirclePoint x) const;
  CirclePoint inverse_eval(CirclePoint y) const;

  /// Lift increment F(x + len) - F(x) over [x, x + len]; the image length of that arc.
  double image_length(double start, double len) const;

  DerivBounds bounds() const;

  /// Conjugate by x -> -x (orientation-reversing flip of the coordinate).
  LiftMap flipped() const;

 private:
  struct Node;
  enum class Mode { TrueLift, ReducedLift, Circle };

  explicit LiftMap(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  double value(double x, Mode mode) const;
  std::pair<double, double> value_deriv(double x, Mode mode) const;
  double solve(double y, Mode mode) const;

  std::shared_ptr<const Node> node_;
};

/// (F^n(0) - 0) / n on the lift.
double rotation_number(const LiftMap& f, long n_iters);

/// Roots of F(x) - x - k on a grid of grid_n cells, refined by bisection.
std::vector<FixedPoint> find_fixed_points(const LiftMap& f, int grid_n = 1024);

/// True when alpha is within tol of p/q for some q <= max_den.
bool is_near_rational(double alpha, int max_den = 1000, double tol = 1e-9);

}  // namespace cifs
