// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "circle_maps.hpp"

namespace cifs {

/// Counterclockwise arc [start, start + length); length 1 is the full circle.
struct Arc {
  double start = 0.0;
  double length = 1.0;

  Arc() = default;
  Arc(double s, double len);
  static Arc full() { return Arc(0.0, 1.0); }
  /// Arc from a to b counterclockwise.
  static Arc between(double a, double b);

  double end() const { return start + length; }  // may exceed 1
  double end_point() const { return wrap01(start + length); }
  double midpoint() const { return wrap01(start + 0.5 * length); }
  bool is_full() const { return length >= 1.0; }
  bool contains(double x) const;
  /// Offset of x from start in [0, 1).
  double offset(double x) const { return wrap01(x - start); }
  /// Shrink (r > 0) or grow (r < 0) symmetrically; full arcs are unchanged.
  Arc shrunk(double r) const;
};

/// Image of an arc under an orientation-preserving map, from endpoint images.
Arc image(const LiftMap& f, const Arc& a);
/// Preimage of an arc, from endpoint preimages.
Arc preimage(const LiftMap& f, const Arc& a);

/// Largest r with `inner` grown by r still inside `outer`; negative when
/// `inner` sticks out. Full `outer` gives +inf-like value 1.
double inclusion_margin(const Arc& inner, const Arc& outer);

/// Whether the union of `arcs`, each shrunk by r, covers `target` grown by r.
bool covers(std::span<const Arc> arcs, const Arc& target, double r = 0.0);

/// Largest r for which covers(arcs, target, r) holds (bisection; negative if not covered).
double cover_margin(std::span<const Arc> arcs, const Arc& target);

/// Longest connected piece of the intersection, if any.
std::optional<Arc> intersection(const Arc& a, const Arc& b);

}  // namespace cifs
