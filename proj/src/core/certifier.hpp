// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Constructive robust-minimality certificates for IFS(g1, g2) with g1 an
// irrational rotation and g2 a map with an attracting fixed point. The
// conditions checked are:
//   (1) closure(B) is covered by h_1(B), ..., h_k(B), with h_i = g1^{n_i} g2;
//   (2) g1^{n_i}(closure D) and h_i(closure Z) lie in the zone Z = (p+delta, p+eps);
//   (3) Dh_i < lambda < 1 on Z;
//   (4) translates g1^{m}(B) cover S^1, and so do g1^{-m}(B).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arcs.hpp"
#include "circle_maps.hpp"
#include "ifs.hpp"
#include "rng.hpp"
#include "symbolic.hpp"

namespace cifs {

inline constexpr double kDefaultDerivMargin = 0.05;
inline constexpr double kSafety = 0.1;
inline constexpr double kRadiusCap = 1e-3;

struct BasinData {
  CirclePoint p;
  double eps = 0.0;
  double delta = 0.0;
  Arc A, B, D, zone;
  double deriv_max = 0.0;  // max Dg2 over the grid of A
};

/// Attracting fixed point of g2 with a right-sided contracting basin.
BasinData locate_basin(const LiftMap& g2, double m_deriv = kDefaultDerivMargin, int grid_n = 4096);

struct CoverWords {
  std::vector<long> exponents;
  std::vector<LiftMap> maps;  // h_i = g1^{n_i} ∘ g2
  double m1 = 0.0;
  double m2 = 0.0;
};

/// h_i = g1^{n_i} ∘ g2.
LiftMap cover_map(const LiftMap& g1, const LiftMap& g2, long n);

CoverWords search_cover_words(const LiftMap& g1, const LiftMap& g2, const BasinData& basin, long n_max);

/// Grid bound of max Dh_i over the zone, inflated by a second-derivative bound.
double verify_contraction(const std::vector<LiftMap>& h_list, const BasinData& basin, int grid_n);

struct GlobalCover {
  std::vector<long> T;  // g1^{m}(B)
  std::vector<long> S;  // g1^{-m}(B)
  double m4 = 0.0;
};

GlobalCover verify_global_cover(const LiftMap& g1, const Arc& B, long n_max);

struct Margins {
  double m1 = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  double basin = 0.0;  // inclusion of B in Z
  bool all_positive() const { return m1 > 0 && m2 > 0 && m3 > 0 && m4 > 0 && basin > 0; }
};

struct Amplification {
  double c0 = 0.0;  // C^0 error per unit perturbation, worst composition
  double c1 = 0.0;  // derivative error per unit perturbation, worst h_i
};

struct Certificate {
  std::string direction;  // "forward" or "backward"
  bool flipped = false;
  LiftMap g1 = LiftMap::identity();
  LiftMap g2 = LiftMap::identity();
  int g2_power = 1;
  BasinData basin;
  std::vector<long> cover_exponents;
  double lambda = 1.0;
  GlobalCover global_cover;
  Margins margins;
  Amplification amplification;
  double radius = 0.0;
  int grid_n = 0;

  LiftMap g2_effective() const { return LiftMap::power(g2, g2_power); }
  std::vector<LiftMap> cover_maps() const;
};

struct CertifyParams {
  long n_max = 10000;
  long global_n_max = 10000;
  int grid_n = 4096;
  int basin_grid_n = 4096;
  double m_deriv = kDefaultDerivMargin;
  double c_safety = kSafety;
  double radius_cap = kRadiusCap;
  int max_g2_power = 8;
};

struct CertificatePair {
  Certificate forward;
  Certificate backward;
};

/// One direction: certifies IFS(g1, g2) as given.
Certificate certify_direction(const LiftMap& g1, const LiftMap& g2, const std::string& direction,
                              const CertifyParams& params);
/// Forward for (g1, g2) and backward for (g1^{-1}, g2^{-1}).
CertificatePair certify_robust_minimality(const LiftMap& g1, const LiftMap& g2, const CertifyParams& params = {});

struct Verification {
  Margins margins;
  double lambda = 1.0;
  Amplification amplification;
  double radius = 0.0;
  bool ok = false;
  std::vector<std::string> problems;
};

/// Recompute all conditions for the frozen basin and words, using the given
/// generators (the certificate's own when omitted).
Verification verify_frozen(const Certificate& c, const std::optional<std::pair<LiftMap, LiftMap>>& generators = {},
                           double c_safety = kSafety, double radius_cap = kRadiusCap);

/// verify_frozen plus consistency of the stored numbers (tolerance 1e-9).
Verification check_certificate(const Certificate& c);

/// P ∘ g with P a sine bump of C^1 size `size` relative to g.
LiftMap perturb_map(const LiftMap& g, double size, CounterRng& rng);

struct RobustnessTrial {
  double size = 0.0;
  Verification forward;
  Verification backward;
  bool ok() const { return forward.ok && backward.ok; }
};

/// verify_frozen for perturbed copies of the original (unflipped, forward)
/// generators, oriented to match the certificate.
Verification verify_perturbed(const Certificate& c, const LiftMap& g1, const LiftMap& g2);

/// Perturbs the original (g1, g2) and re-verifies both certificates with frozen words.
std::vector<RobustnessTrial> robustness_trials(const CertificatePair& pair, double size, int n_trials,
                                               std::uint64_t seed);

struct NestedLimit {
  Word indices;
  CirclePoint approximant;
  double bound = 0.0;
  double error = 0.0;
  bool within_bound = false;
};

/// Address of x in closure(B) under the h_i and the nested approximant at y.
NestedLimit nested_limit(const std::vector<LiftMap>& h_list, const BasinData& basin, double lambda, CirclePoint x,
                         int n_levels, std::optional<CirclePoint> y = std::nullopt);

struct UniversalWord {
  Word sigma;
  std::vector<int> capture_times;  // per coarse grid point
  bool verified = false;
  std::size_t fine_grid = 0;
};

/// First t in 0..|sigma| with f_{sigma_t} ... f_{sigma_1}(z) in target.
std::optional<std::size_t> capture_time(const IFS& ifs, const Word& sigma, const Arc& target, CirclePoint z);

UniversalWord find_universal_word(const IFS& ifs, const Arc& target, int z_grid, int max_len);

}  // namespace cifs
