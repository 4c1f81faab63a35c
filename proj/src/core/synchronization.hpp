// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Synchronization statistics, random repellers and the hitting-time tail
// bound for random orbits.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arcs.hpp"
#include "ifs.hpp"
#include "symbolic.hpp"

namespace cifs {

inline constexpr double kThetaGrow = 0.9;

/// d(f^n_w(x), f^n_w(y)) for n = 0..|w|.
std::vector<double> pair_distance_trajectory(const IFS& ifs, const Word& w, CirclePoint x, CirclePoint y);

struct SyncReport {
  std::string label;
  std::string model_kind;
  int n_pairs = 0;
  int horizon = 0;
  double tol_sync = 0.0;
  double sync_fraction = 0.0;
  double median_final_distance = 0.0;
  // Fraction of the same sampled pairs that start within tol_sync.
  double baseline_fraction = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

SyncReport sync_fraction(const IFS& ifs, const SequenceModel& model, int n, int n_pairs, double tol_sync,
                         std::uint64_t seed);

/// |sync - baseline| in units of the pooled binomial standard error.
double sync_z_score(const SyncReport& r);

struct RepellerEstimate {
  Word omega_prefix;
  int levels = 0;
  std::vector<CirclePoint> points;
  std::vector<Arc> brackets;  // final bracketing arc of each point
  int ell_hat = 0;
  double residual = 0.0;  // largest half-length of a final bracket
};

inline constexpr int kDefaultRepellerLevels = 24;
inline constexpr int kMaxRepellerLevels = 40;

/// Partition refinement: arcs at level j are the 2^j dyadic arcs; those whose
/// images under f^n_w carry the image mass are split further.
RepellerEstimate detect_repellers(const IFS& ifs, const Word& w, int m_levels = kDefaultRepellerLevels);

enum class AntonovCase { Case1, Case2, Case3, Inconclusive };
const char* to_string(AntonovCase c);

struct ClassifyParams {
  int sync_horizon = 2000;
  int n_pairs = 500;
  double tol_sync = 1e-3;
  int repeller_horizon = 5000;
  int n_seeds = 20;
  int m_levels = 16;
  double majority = 0.75;
  bool check_minimality = false;
  double minimality_eps = 0.05;
  int minimality_depth = 200;
  std::uint64_t seed = 0;
};

struct AntonovEvidence {
  AntonovCase verdict = AntonovCase::Inconclusive;
  int ell = 0;
  SyncReport sync;
  double z_score = 0.0;
  std::vector<int> ell_hats;  // 0 marks an unpolarized run
  double mode_fraction = 0.0;
  std::vector<std::string> notes;
};

AntonovEvidence antonov_classify(const IFS& ifs, const SequenceModel& model, const ClassifyParams& params);

struct TailRow {
  int n = 0;
  double empirical = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool ok = false;
};

struct TailCheck {
  int letter = 1;
  int r = 0;
  int ell = 0;
  double p = 0.0;
  std::vector<TailRow> rows;
  bool all_ok = false;
};

/// (1 - p^ell)^(1 + floor(n / ell)).
double tail_bound(double p, int ell, int n);

/// Smallest r with S^1 covered by h^{-1}(target), ..., h^{-r}(target).
int covering_count(const LiftMap& h, const Arc& target, int r_max = 20000);

/// An empty n_grid tabulates n = ell, 2 ell, ..., 10 ell.
TailCheck hitting_tail_check(const IFS& ifs, const SequenceModel& model, const Arc& target, CirclePoint x,
                             std::vector<int> n_grid, int n_trials, std::uint64_t seed, int minimal_letter = 1);

}  // namespace cifs
