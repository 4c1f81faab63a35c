// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "arcs.hpp"

#include <algorithm>
#include <utility>

namespace cifs {

Arc::Arc(double s, double len) : start(wrap01(s)), length(std::clamp(len, 0.0, 1.0)) {}

Arc Arc::between(double a, double b) {
  double len = wrap01(b - a);
  if (len == 0.0 && a != b) len = 0.0;
  return Arc(a, len);
}

bool Arc::contains(double x) const { return is_full() || offset(x) < length; }

Arc Arc::shrunk(double r) const {
  if (is_full()) return *this;
  double len = length - 2.0 * r;
  if (len <= 0.0) return Arc(midpoint(), 0.0);
  return Arc(start + r, len);
}

Arc image(const LiftMap& f, const Arc& a) {
  if (a.is_full()) return Arc::full();
  return Arc(f(a.start).value(), f.image_length(a.start, a.length));
}

Arc preimage(const LiftMap& f, const Arc& a) {
  if (a.is_full()) return Arc::full();
  double s = f.inverse_eval(a.start).value();
  double e = f.inverse_eval(a.end_point()).value();
  double len = wrap01(e - s);
  // A near-full arc whose endpoints collapse numerically.
  if (len == 0.0 && a.length > 0.5) len = 1.0;
  return Arc(s, len);
}

double inclusion_margin(const Arc& inner, const Arc& outer) {
  if (outer.is_full()) return 1.0;
  if (inner.is_full()) return -1.0;
  // Signed offset: starts slightly before `outer` come out negative.
  double o = outer.offset(inner.start);
  double slack = 1.0 - outer.length;
  if (o > outer.length + 0.5 * slack) o -= 1.0;
  return std::min(o, outer.length - o - inner.length);
}

bool covers(std::span<const Arc> arcs, const Arc& target, double r) {
  Arc t = target;
  bool full_target = target.is_full();
  double t_len = full_target ? 1.0 : target.length + 2.0 * r;
  if (!full_target) {
    if (t_len >= 1.0) {
      full_target = true;
      t_len = 1.0;
    } else if (t_len <= 0.0) {
      return true;
    }
    t = Arc(target.start - r, 0.0);  // only the start is used below
  }
  std::vector<std::pair<double, double>> iv;
  for (const Arc& a : arcs) {
    if (a.is_full()) return true;
    double len = a.length - 2.0 * r;
    if (len <= 0.0) continue;
    if (len >= 1.0) return true;
    double o = wrap01(a.start + r - t.start);
    iv.emplace_back(o, o + len);
    iv.emplace_back(o - 1.0, o - 1.0 + len);
  }
  std::sort(iv.begin(), iv.end());
  double frontier = 0.0;
  for (const auto& [lo, hi] : iv) {
    if (lo > frontier) break;
    frontier = std::max(frontier, hi);
    if (frontier >= t_len) return true;
  }
  return frontier >= t_len;
}

double cover_margin(std::span<const Arc> arcs, const Arc& target) {
  double lo, hi;
  if (covers(arcs, target, 0.0)) {
    lo = 0.0;
    hi = 0.5;
    if (covers(arcs, target, hi)) return hi;
  } else {
    hi = 0.0;
    lo = -0.5;
    if (!covers(arcs, target, lo)) return lo;
  }
  for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
    double mid = 0.5 * (lo + hi);
    if (covers(arcs, target, mid)) lo = mid; else hi = mid;
  }
  return lo;
}

std::optional<Arc> intersection(const Arc& a, const Arc& b) {
  if (a.is_full()) return b;
  if (b.is_full()) return a;
  // Work relative to a.start: a = [0, la]; b appears as [o, o + lb] and its shift by -1.
  double o = a.offset(b.start);
  std::optional<Arc> best;
  for (double shift : {0.0, -1.0}) {
    double lo = std::max(0.0, o + shift);
    double hi = std::min(a.length, o + shift + b.length);
    if (hi > lo && (!best || hi - lo > best->length)) best = Arc(a.start + lo, hi - lo);
  }
  return best;
}

}  // namespace cifs
