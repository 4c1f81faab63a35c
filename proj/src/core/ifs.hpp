// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Iterated function systems of circle homeomorphisms. Words are applied in
// the orbital-branch order: apply(w, x) = f_{w_n} ∘ ... ∘ f_{w_1}(x), so the
// first letter acts first.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arcs.hpp"
#include "circle_maps.hpp"
#include "symbolic.hpp"

namespace cifs {

inline constexpr double kDedupRes = 1e-9;
inline constexpr std::size_t kDefaultOrbitCap = 1'000'000;

class IFS {
 public:
  explicit IFS(std::vector<LiftMap> generators, std::string label = {});

  int size() const { return static_cast<int>(generators_.size()); }
  const std::string& label() const { return label_; }
  const std::vector<LiftMap>& generators() const { return generators_; }
  /// 1-based letter.
  const LiftMap& generator(int letter) const;

  /// The IFS of the inverse maps, letters keep their index.
  IFS inverse_ifs() const;

  CirclePoint apply(const Word& w, CirclePoint x) const;
  /// Points f^1(x), ..., f^n(x) along the branch.
  std::vector<CirclePoint> trajectory(const Word& w, CirclePoint x) const;
  /// Image point and derivative of the branch composition.
  std::pair<CirclePoint, double> apply_deriv(const Word& w, CirclePoint x) const;
  /// f_{w_1} ∘ ... ∘ f_{w_n}(x): the last letter acts first.
  CirclePoint hat_apply(const Word& w, CirclePoint x) const;
  /// Preimage under the branch composition.
  CirclePoint inverse_apply(const Word& w, CirclePoint y) const;
  /// Image of an arc under the branch composition (endpoints plus lift length).
  Arc apply_arc(const Word& w, const Arc& a) const;
  /// The branch composition as a single map.
  LiftMap as_map(const Word& w) const;

  void check_word(const Word& w) const;

 private:
  std::vector<LiftMap> generators_;
  std::string label_;
};

CirclePoint branch_apply(const IFS& ifs, const Word& w, CirclePoint x);

struct HatImage {
  std::size_t n;
  double image_length;  // total length of the image of S^1 (1 = full circle)
  double diameter;      // diameter in the circle metric
};

/// Size of \hat f^n_w(S^1) for n = 0..|w|, from lift images of a grid of arcs.
std::vector<HatImage> hat_diameter_decay(const IFS& ifs, const Word& w, int grid_n);

/// Breadth-first orbit {h(x) : 1 <= |h| <= depth}, generators in index order,
/// deduplicated at `dedup_res`, truncated at `cap` points.
std::vector<CirclePoint> semigroup_orbit(const IFS& ifs, CirclePoint x, int depth, std::size_t cap = kDefaultOrbitCap,
                                         double dedup_res = kDedupRes);

struct MinimalityReport {
  bool minimal = false;
  double worst_gap = 0.0;  // worst covering radius of the target grid over all starts
  std::optional<CirclePoint> witness;
  int start_grid = 0;
  int depth = 0;
  double eps = 0.0;
};

MinimalityReport minimality_estimate(const IFS& ifs, double eps, int start_grid, int depth,
                                     std::size_t cap = kDefaultOrbitCap);

struct DensityResult {
  double fraction = 0.0;
  double std_error = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

DensityResult random_orbit_density(const IFS& ifs, const SequenceModel& model, CirclePoint x, double eps, int n_max,
                                   int n_samples, std::uint64_t seed);

/// Tracks which points of the uniform eps/2 grid have been approached within eps.
class CoverageGrid {
 public:
  explicit CoverageGrid(double eps);
  /// Returns true once every target point is covered.
  bool mark(double y);
  bool complete() const { return covered_ == targets_.size(); }
  std::size_t size() const { return targets_.size(); }
  /// Covering radius of a point set over the target grid.
  double covering_radius(std::vector<double> points) const;

 private:
  double eps_;
  std::vector<bool> targets_;
  std::size_t covered_ = 0;
};

}  // namespace cifs
