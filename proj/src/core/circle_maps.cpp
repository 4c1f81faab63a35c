// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "circle_maps.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace cifs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac_part(double x) { return x - std::floor(x); }
}  // namespace

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::NoAttractingSide: return "NoAttractingSide";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::SearchExhausted: return "SearchExhausted";
    case ErrorKind::ContractionFails: return "ContractionFails";
    case ErrorKind::VerificationFailed: return "VerificationFailed";
    case ErrorKind::Unpolarized: return "Unpolarized";
    case ErrorKind::NoMinimalGenerator: return "NoMinimalGenerator";
    case ErrorKind::HorizonExceeded: return "HorizonExceeded";
    case ErrorKind::LengthExceeded: return "LengthExceeded";
    case ErrorKind::CoverGap: return "CoverGap";
  }
  return "Unknown";
}

const char* to_string(FixedPointStability s) {
  switch (s) {
    case FixedPointStability::Attracting: return "attracting";
    case FixedPointStability::Repelling: return "repelling";
    case FixedPointStability::Neutral: return "neutral";
  }
  return "neutral";
}

FixedPointStability classify_multiplier(double multiplier, double tol_neutral) {
  if (std::abs(multiplier - 1.0) <= tol_neutral) return FixedPointStability::Neutral;
  return multiplier < 1.0 ? FixedPointStability::Attracting : FixedPointStability::Repelling;
}

DerivBounds DerivBounds::compose(const DerivBounds& outer, const DerivBounds& inner) {
  // (f ∘ g)'' = f''(g) g'^2 + f'(g) g''
  DerivBounds r;
  r.min_d1 = outer.min_d1 * inner.min_d1;
  r.max_d1 = outer.max_d1 * inner.max_d1;
  r.max_d2 = outer.max_d2 * inner.max_d1 * inner.max_d1 + outer.max_d1 * inner.max_d2;
  return r;
}

DerivBounds DerivBounds::inverted() const {
  // (f^-1)'' = -f''(f^-1) / f'(f^-1)^3
  DerivBounds r;
  r.min_d1 = 1.0 / max_d1;
  r.max_d1 = 1.0 / min_d1;
  r.max_d2 = max_d2 / (min_d1 * min_d1 * min_d1);
  return r;
}

struct LiftMap::Node {
  Kind kind = Kind::Rotation;
  double alpha = 0.0;
  double a = 0.0;
  double b = 0.0;
  int freq = 1;
  double phase = 0.0;
  double amp = 0.0;  // b / (2 pi freq)
  std::vector<LiftMap> parts;  // composition parts, or {base} for power/inverse
  long exponent = 0;
};

LiftMap LiftMap::rotation(double alpha) {
  if (!std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "rotation angle must be finite");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rotation;
  n->alpha = alpha;
  return LiftMap(std::move(n));
}

LiftMap LiftMap::sine(double a, double b, int freq, double phase) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(phase))
    throw Error(ErrorKind::InvalidArgument, "sine parameters must be finite");
  if (!(std::abs(b) < 1.0)) throw Error(ErrorKind::InvalidArgument, "sine map requires |b| < 1");
  if (freq < 1) throw Error(ErrorKind::InvalidArgument, "sine frequency must be >= 1");
  if (b == 0.0) return rotation(a);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Sine;
  n->a = a;
  n->b = b;
  n->freq = freq;
  n->phase = phase;
  n->amp = b / (kTwoPi * freq);
  return LiftMap(std::move(n));
}

LiftMap LiftMap::composition(std::vector<LiftMap> maps) {
  std::vector<LiftMap> flat;
  for (auto& m : maps) {
    if (m.kind() == Kind::Composition) {
      for (const auto& p : m.parts()) flat.push_back(p);
    } else {
      flat.push_back(m);
    }
  }
  // Merge runs of adjacent rotations; drop the identity.
  std::vector<LiftMap> merged;
  for (auto& m : flat) {
    if (m.is_rotation() && !merged.empty() && merged.back().is_rotation()) {
      merged.back() = rotation(merged.back().alpha() + m.alpha());
    } else {
      merged.push_back(m);
    }
  }
  std::erase_if(merged, [&](const LiftMap& m) { return m.is_rotation() && m.alpha() == 0.0 && merged.size() > 1; });
  if (merged.empty()) return identity();
  if (merged.size() == 1) return merged.front();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Composition;
  n->parts = std::move(merged);
  return LiftMap(std::move(n));
}

LiftMap LiftMap::power(const LiftMap& base, long exponent) {
  if (exponent == 0) return identity();
  if (exponent == 1) return base;
  switch (base.kind()) {
    case Kind::Rotation: return rotation(static_cast<double>(exponent) * base.alpha());
    case Kind::Power: return power(base.base(), exponent * base.exponent());
    case Kind::Inverse: return power(base.base(), -exponent);
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Power;
  n->parts = {base};
  n->exponent = exponent;
  return LiftMap(std::move(n));
}

LiftMap LiftMap::inverse(const LiftMap& base) {
  switch (base.kind()) {
    case Kind::Rotation: return rotation(-base.alpha());
    case Kind::Inverse: return base.base();
    case Kind::Power: return power(base.base(), -base.exponent());
    case Kind::Composition: {
      std::vector<LiftMap> inv;
      for (auto it = base.parts().rbegin(); it != base.parts().rend(); ++it) inv.push_back(inverse(*it));
      return composition(std::move(inv));
    }
    case Kind::Sine: break;
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Inverse;
  n->parts = {base};
  return LiftMap(std::move(n));
}

LiftMap::Kind LiftMap::kind() const { return node_->kind; }
double LiftMap::alpha() const { return node_->alpha; }
double LiftMap::sine_a() const { return node_->a; }
double LiftMap::sine_b() const { return node_->b; }
int LiftMap::sine_freq() const { return node_->freq; }
double LiftMap::sine_phase() const { return node_->phase; }
const std::vector<LiftMap>& LiftMap::parts() const { return node_->parts; }
const LiftMap& LiftMap::base() const { return node_->parts.front(); }
long LiftMap::exponent() const { return node_->exponent; }

double LiftMap::value(double x, Mode mode) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Rotation:
      if (mode == Mode::TrueLift) return x + n.alpha;
      if (mode == Mode::ReducedLift) return x + frac_part(n.alpha);
      return wrap01(x + frac_part(n.alpha));
    case Kind::Sine: {
      double s = n.amp * std::sin(kTwoPi * (n.freq * x + n.phase));
      if (mode == Mode::TrueLift) return x + n.a + s;
      if (mode == Mode::ReducedLift) return x + frac_part(n.a) + s;
      return wrap01(x + frac_part(n.a) + s);
    }
    case Kind::Composition:
      for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) x = it->value(x, mode);
      return x;
    case Kind::Power: {
      const LiftMap& b = n.parts.front();
      if (n.exponent > 0) {
        for (long i = 0; i < n.exponent; ++i) x = b.value(x, mode);
      } else {
        for (long i = 0; i < -n.exponent; ++i) x = b.solve(x, mode);
      }
      return x;
    }
    case Kind::Inverse: return n.parts.front().solve(x, mode);
  }
  return x;
}

std::pair<double, double> LiftMap::value_deriv(double x, Mode mode) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Rotation: return {value(x, mode), 1.0};
    case Kind::Sine: {
      double arg = kTwoPi * (n.freq * x + n.phase);
      double s = n.amp * std::sin(arg);
      double d = 1.0 + n.b * std::cos(arg);
      if (mode == Mode::TrueLift) return {x + n.a + s, d};
      if (mode == Mode::ReducedLift) return {x + frac_part(n.a) + s, d};
      return {wrap01(x + frac_part(n.a) + s), d};
    }
    case Kind::Composition: {
      double d = 1.0;
      for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) {
        auto [y, dy] = it->value_deriv(x, mode);
        x = y;
        d *= dy;
      }
      return {x, d};
    }
    case Kind::Power: {
      const LiftMap& b = n.parts.front();
      double d = 1.0;
      if (n.exponent > 0) {
        for (long i = 0; i < n.exponent; ++i) {
          auto [y, dy] = b.value_deriv(x, mode);
          x = y;
          d *= dy;
        }
      } else {
        Mode lm = mode == Mode::TrueLift ? Mode::TrueLift : Mode::ReducedLift;
        for (long i = 0; i < -n.exponent; ++i) {
          double y = b.solve(x, mode);
          d /= b.value_deriv(y, lm).second;
          x = y;
        }
      }
      return {x, d};
    }
    case Kind::Inverse: {
      const LiftMap& b = n.parts.front();
      Mode lm = mode == Mode::TrueLift ? Mode::TrueLift : Mode::ReducedLift;
      double y = b.solve(x, mode);
      return {y, 1.0 / b.value_deriv(y, lm).second};
    }
  }
  return {x, 1.0};
}

// Find x with value(x) = y by bracketing on a unit window, then safeguarded Newton.
double LiftMap::solve(double y, Mode mode) const {
  const bool circle = mode == Mode::Circle;
  const Mode lm = circle ? Mode::ReducedLift : mode;
  if (is_rotation()) {
    double x = y - (lm == Mode::TrueLift ? alpha() : frac_part(alpha()));
    return circle ? wrap01(x) : x;
  }
  const double scale = std::max(1.0, std::abs(y));
  const double tol = kTolInv * scale;

  double lo = y - (value(y, lm) - y);
  double flo = value(lo, lm);
  int guard = 0;
  while (flo > y) {
    lo -= 1.0;
    flo = value(lo, lm);
    if (++guard > 64) throw Error(ErrorKind::ConvergenceFailure, "could not bracket inverse (lower)");
  }
  double hi = lo + 1.0;
  double fhi = value(hi, lm);
  while (fhi < y) {
    lo = hi;
    flo = fhi;
    hi += 1.0;
    fhi = value(hi, lm);
    if (++guard > 128) throw Error(ErrorKind::ConvergenceFailure, "could not bracket inverse (upper)");
  }

  double x = (fhi > flo) ? lo + (y - flo) / (fhi - flo) * (hi - lo) : 0.5 * (lo + hi);
  double best_x = x;
  double best_r = std::numeric_limits<double>::infinity();
  for (int it = 0; it < kMaxInverseIter; ++it) {
    auto [f, d] = value_deriv(x, lm);
    double r = f - y;
    if (std::abs(r) < best_r) {
      best_r = std::abs(r);
      best_x = x;
    }
    if (std::abs(r) <= tol) break;
    if (r < 0) lo = x; else hi = x;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
    double xn = (d > 0.0) ? x - r / d : lo - 1.0;
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    x = xn;
  }
  // Bracket collapsed to the floating-point resolution is accepted; anything
  // else means the map is not monotone.
  if (best_r > tol && hi - lo > 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x)))
    throw Error(ErrorKind::ConvergenceFailure, "inverse residual " + std::to_string(best_r) + " after max_iter");
  return circle ? wrap01(best_x) : best_x;
}

double LiftMap::lift(double x) const { return value(x, Mode::TrueLift); }
std::pair<double, double> LiftMap::lift_deriv(double x) const { return value_deriv(x, Mode::TrueLift); }
double LiftMap::inverse_lift(double y) const { return solve(y, Mode::TrueLift); }

CirclePoint LiftMap::operator()(CirclePoint x) const { return CirclePoint(value(x.value(), Mode::Circle)); }

double LiftMap::deriv(CirclePoint x) const { return value_deriv(x.value(), Mode::Circle).second; }

std::pair<CirclePoint, double> LiftMap::eval_deriv(CirclePoint x) const {
  auto [y, d] = value_deriv(x.value(), Mode::Circle);
  return {CirclePoint(y), d};
}

CirclePoint LiftMap::inverse_eval(CirclePoint y) const { return CirclePoint(solve(y.value(), Mode::Circle)); }

double LiftMap::image_length(double start, double len) const {
  if (len >= 1.0) return 1.0;
  double s = wrap01(start);
  double d = value(s + len, Mode::ReducedLift) - value(s, Mode::ReducedLift);
  return std::clamp(d, 0.0, 1.0);
}

DerivBounds LiftMap::bounds() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Rotation: return {};
    case Kind::Sine: {
      double ab = std::abs(n.b);
      return {1.0 - ab, 1.0 + ab, kTwoPi * n.freq * ab};
    }
    case Kind::Composition: {
      DerivBounds acc;
      for (auto it = n.parts.rbegin(); it != n.parts.rend(); ++it) acc = DerivBounds::compose(it->bounds(), acc);
      return acc;
    }
    case Kind::Power: {
      DerivBounds b = n.parts.front().bounds();
      if (n.exponent < 0) b = b.inverted();
      DerivBounds acc;
      long count = n.exponent < 0 ? -n.exponent : n.exponent;
      for (long i = 0; i < count; ++i) acc = DerivBounds::compose(b, acc);
      return acc;
    }
    case Kind::Inverse: return n.parts.front().bounds().inverted();
  }
  return {};
}

LiftMap LiftMap::flipped() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Rotation: return rotation(-n.alpha);
    case Kind::Sine: return sine(-n.a, n.b, n.freq, -n.phase);
    case Kind::Composition: {
      std::vector<LiftMap> f;
      for (const auto& p : n.parts) f.push_back(p.flipped());
      return composition(std::move(f));
    }
    case Kind::Power: return power(n.parts.front().flipped(), n.exponent);
    case Kind::Inverse: return inverse(n.parts.front().flipped());
  }
  return *this;
}

double rotation_number(const LiftMap& f, long n_iters) {
  if (n_iters < 1) throw Error(ErrorKind::InvalidArgument, "rotation_number needs n_iters >= 1");
  if (f.is_rotation()) return f.alpha();
  double x = 0.0;
  // Keep the running lift small: F(x + k) = F(x) + k.
  double whole = 0.0;
  for (long i = 0; i < n_iters; ++i) {
    x = f.lift(x);
    double k = std::floor(x);
    whole += k;
    x -= k;
  }
  return (whole + x) / static_cast<double>(n_iters);
}

std::vector<FixedPoint> find_fixed_points(const LiftMap& f, int grid_n) {
  if (grid_n < 16) throw Error(ErrorKind::InvalidArgument, "find_fixed_points needs grid_n >= 16");
  std::vector<double> xs(grid_n + 1), ds(grid_n + 1);
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -dmin;
  for (int j = 0; j <= grid_n; ++j) {
    xs[j] = static_cast<double>(j) / grid_n;
    ds[j] = f.lift(xs[j]) - xs[j];
    dmin = std::min(dmin, ds[j]);
    dmax = std::max(dmax, ds[j]);
  }
  // The displacement F(x) - x has oscillation < 1, so at most one integer is crossed.
  double k = std::floor(dmax);
  if (k < dmin) return {};
  auto g = [&](double x) { return f.lift(x) - x - k; };

  std::vector<double> roots;
  for (int j = 0; j < grid_n; ++j) {
    double g0 = ds[j] - k;
    double g1 = ds[j + 1] - k;
    if (g0 == 0.0) {
      roots.push_back(xs[j]);
      continue;
    }
    if (g1 == 0.0 || (g0 < 0) == (g1 < 0)) continue;
    double lo = xs[j], hi = xs[j + 1];
    for (int it = 0; it < kMaxInverseIter && hi - lo > kTolInv; ++it) {
      double mid = 0.5 * (lo + hi);
      double gm = g(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((gm < 0) == (g0 < 0)) lo = mid; else hi = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }

  std::vector<FixedPoint> out;
  for (double r : roots) {
    CirclePoint p(r);
    bool dup = std::any_of(out.begin(), out.end(), [&](const FixedPoint& q) { return distance(q.point, p) < 1e-9; });
    if (dup) continue;
    double d = f.deriv(p);
    out.push_back({p, d, classify_multiplier(d)});
  }
  std::sort(out.begin(), out.end(), [](const FixedPoint& a, const FixedPoint& b) { return a.point.value() < b.point.value(); });
  return out;
}

bool is_near_rational(double alpha, int max_den, double tol) {
  for (int q = 1; q <= max_den; ++q) {
    double v = alpha * q;
    if (std::abs(v - std::round(v)) <= tol * q) return true;
  }
  return false;
}

}  // namespace cifs
