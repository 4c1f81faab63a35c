// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "synchronization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "errors.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace cifs {

std::vector<double> pair_distance_trajectory(const IFS& ifs, const Word& w, CirclePoint x, CirclePoint y) {
  ifs.check_word(w);
  std::vector<double> out;
  out.reserve(w.size() + 1);
  out.push_back(distance(x, y));
  for (int l : w.letters()) {
    const LiftMap& f = ifs.generator(l);
    x = f(x);
    y = f(y);
    out.push_back(distance(x, y));
  }
  return out;
}

SyncReport sync_fraction(const IFS& ifs, const SequenceModel& model, int n, int n_pairs, double tol_sync,
                         std::uint64_t seed) {
  if (!(tol_sync > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol_sync must be > 0");
  if (n < 0 || n_pairs < 1) throw Error(ErrorKind::InvalidArgument, "need n >= 0 and n_pairs >= 1");
  if (model.alphabet() != ifs.size()) throw Error(ErrorKind::InvalidArgument, "model alphabet differs from IFS size");
  std::vector<double> final_d(static_cast<std::size_t>(n_pairs));
  std::vector<double> start_d(final_d.size());
  parallel_for(final_d.size(), [&](std::size_t i) {
    CounterRng pts(seed, 2 * i + 1);
    CirclePoint x(pts.uniform());
    CirclePoint y(pts.uniform());
    start_d[i] = distance(x, y);
    SequenceStream omega(model, seed, 2 * i);
    for (int t = 0; t < n; ++t) {
      const LiftMap& f = ifs.generator(omega.letter(static_cast<std::size_t>(t)));
      x = f(x);
      y = f(y);
    }
    final_d[i] = distance(x, y);
  });
  SyncReport r;
  r.label = ifs.label();
  r.model_kind = model.kind() == SequenceModel::Kind::Bernoulli ? "bernoulli" : "markov";
  r.n_pairs = n_pairs;
  r.horizon = n;
  r.tol_sync = tol_sync;
  r.seed = seed;
  auto frac_below = [&](const std::vector<double>& d) {
    return static_cast<double>(std::count_if(d.begin(), d.end(), [&](double v) { return v < tol_sync; })) / n_pairs;
  };
  r.sync_fraction = frac_below(final_d);
  r.baseline_fraction = frac_below(start_d);
  double f = r.sync_fraction, b = r.baseline_fraction;
  r.std_error = std::sqrt((f * (1.0 - f) + b * (1.0 - b)) / n_pairs);
  std::vector<double> sorted = final_d;
  std::sort(sorted.begin(), sorted.end());
  std::size_t mid = sorted.size() / 2;
  r.median_final_distance = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return r;
}

double sync_z_score(const SyncReport& r) {
  double diff = std::abs(r.sync_fraction - r.baseline_fraction);
  if (diff == 0.0) return 0.0;
  // With both fractions degenerate the binomial error is zero; use one pair as the unit.
  double sigma = std::max(r.std_error, 1.0 / r.n_pairs);
  return diff / sigma;
}

namespace {

struct Cell {
  std::uint64_t index;  // dyadic index at the current level
  double mass;          // image length under the branch
};

double dyadic(std::uint64_t idx, int level) { return std::ldexp(static_cast<double>(idx), -level); }

// Largest cells first until their image mass reaches theta; ties by index.
std::vector<Cell> mass_set(std::vector<Cell> cells, double theta) {
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) { return a.mass > b.mass; });
  std::vector<Cell> keep;
  double sum = 0.0;
  for (const Cell& c : cells) {
    if (sum >= theta) break;
    keep.push_back(c);
    sum += c.mass;
  }
  std::sort(keep.begin(), keep.end(), [](const Cell& a, const Cell& b) { return a.index < b.index; });
  return keep;
}

constexpr double kClusterMassFloor = 0.05;

}  // namespace

RepellerEstimate detect_repellers(const IFS& ifs, const Word& w, int m_levels) {
  if (m_levels < 1 || m_levels > kMaxRepellerLevels)
    throw Error(ErrorKind::InvalidArgument, "m_levels must be in [1, 40]");
  ifs.check_word(w);
  if (w.empty()) throw Error(ErrorKind::Unpolarized, "empty word");
  const int probe = std::min(m_levels, 8);
  const std::uint64_t probe_n = std::uint64_t{1} << probe;

  auto image_mass = [&](std::uint64_t idx, int level) {
    return ifs.apply_arc(w, Arc(dyadic(idx, level), std::ldexp(1.0, -level))).length;
  };

  std::vector<Cell> cells(probe_n);
  parallel_for(cells.size(), [&](std::size_t i) { cells[i] = {i, image_mass(i, probe)}; });
  std::vector<Cell> keep = mass_set(std::move(cells), kThetaGrow);
  // A polarized branch concentrates the image mass on few arcs.
  if (keep.size() > std::max<std::size_t>(1, probe_n / 8))
    throw Error(ErrorKind::Unpolarized, "arc images have not polarized along the prefix");

  for (int level = probe + 1; level <= m_levels; ++level) {
    std::vector<Cell> children(2 * keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
      children[2 * i] = {2 * keep[i].index, 0.0};
      children[2 * i + 1] = {2 * keep[i].index + 1, 0.0};
    }
    parallel_for(children.size(), [&](std::size_t i) { children[i].mass = image_mass(children[i].index, level); });
    keep = mass_set(std::move(children), kThetaGrow);
  }

  // Runs of circularly adjacent cells bracket one repeller each.
  const std::uint64_t total = std::uint64_t{1} << m_levels;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> runs;  // first index, count
  std::vector<double> run_mass;
  for (const Cell& c : keep) {
    if (!runs.empty() && runs.back().first + runs.back().second == c.index) {
      ++runs.back().second;
      run_mass.back() += c.mass;
    } else {
      runs.push_back({c.index, 1});
      run_mass.push_back(c.mass);
    }
  }
  if (runs.size() > 1 && runs.back().first + runs.back().second == total && runs.front().first == 0) {
    runs.front() = {runs.back().first, runs.back().second + runs.front().second};
    run_mass.front() += run_mass.back();
    runs.pop_back();
    run_mass.pop_back();
  }

  RepellerEstimate est;
  est.omega_prefix = w;
  est.levels = m_levels;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (run_mass[i] < kClusterMassFloor) continue;
    Arc bracket(dyadic(runs[i].first, m_levels), dyadic(runs[i].second, m_levels));
    est.brackets.push_back(bracket);
    est.points.emplace_back(bracket.midpoint());
    est.residual = std::max(est.residual, 0.5 * bracket.length);
  }
  est.ell_hat = static_cast<int>(est.points.size());
  return est;
}

const char* to_string(AntonovCase c) {
  switch (c) {
    case AntonovCase::Case1: return "Case1";
    case AntonovCase::Case2: return "Case2";
    case AntonovCase::Case3: return "Case3";
    case AntonovCase::Inconclusive: return "Inconclusive";
  }
  return "?";
}

AntonovEvidence antonov_classify(const IFS& ifs, const SequenceModel& model, const ClassifyParams& params) {
  if (params.n_seeds < 1) throw Error(ErrorKind::InvalidArgument, "n_seeds must be >= 1");
  AntonovEvidence ev;
  if (params.check_minimality) {
    auto fwd = minimality_estimate(ifs, params.minimality_eps, 16, params.minimality_depth);
    auto bwd = minimality_estimate(ifs.inverse_ifs(), params.minimality_eps, 16, params.minimality_depth);
    if (!fwd.minimal) ev.notes.push_back("forward minimality not detected at the given eps/depth");
    if (!bwd.minimal) ev.notes.push_back("backward minimality not detected at the given eps/depth");
  }
  ev.sync = sync_fraction(ifs, model, params.sync_horizon, params.n_pairs, params.tol_sync, params.seed);
  ev.z_score = sync_z_score(ev.sync);
  if (ev.z_score <= 3.0) {
    ev.verdict = AntonovCase::Case1;
    ev.mode_fraction = 1.0;
    return ev;
  }

  ev.ell_hats.assign(static_cast<std::size_t>(params.n_seeds), 0);
  const std::uint64_t stream_base = std::uint64_t{1} << 40;
  parallel_for(ev.ell_hats.size(), [&](std::size_t s) {
    Word w = sample_sequence(model, static_cast<std::size_t>(params.repeller_horizon), params.seed, stream_base + s);
    try {
      ev.ell_hats[s] = detect_repellers(ifs, w, params.m_levels).ell_hat;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Unpolarized) throw;
    }
  });
  std::map<int, int> counts;
  for (int e : ev.ell_hats) ++counts[e];
  int mode = 0, best = -1;
  for (auto [value, count] : counts)
    if (count > best) {
      best = count;
      mode = value;
    }
  ev.mode_fraction = static_cast<double>(best) / params.n_seeds;
  if (counts.size() > 1) ev.notes.push_back("ell_hat varied across seeds");
  if (mode == 0 || ev.mode_fraction < params.majority) {
    ev.verdict = AntonovCase::Inconclusive;
    if (mode == 0) ev.notes.push_back("branches synchronize but most runs did not polarize");
    return ev;
  }
  ev.ell = mode;
  ev.verdict = mode == 1 ? AntonovCase::Case2 : AntonovCase::Case3;
  return ev;
}

double tail_bound(double p, int ell, int n) {
  if (!(p > 0.0 && p <= 1.0) || ell < 1 || n < 0) throw Error(ErrorKind::InvalidArgument, "tail_bound needs 0<p<=1, ell>=1, n>=0");
  return std::pow(1.0 - std::pow(p, ell), 1.0 + std::floor(static_cast<double>(n) / ell));
}

int covering_count(const LiftMap& h, const Arc& target, int r_max) {
  if (!(target.length > 0.0)) throw Error(ErrorKind::InvalidArgument, "target must have positive length");
  if (target.is_full()) return 1;
  std::vector<Arc> pre;
  Arc a = target;
  double total = 0.0;
  for (int r = 1; r <= r_max; ++r) {
    a = preimage(h, a);
    pre.push_back(a);
    total += a.length;
    if (total >= 1.0 && covers(pre, Arc::full())) return r;
  }
  throw Error(ErrorKind::SearchExhausted, "preimages of the target do not cover the circle within r_max");
}

TailCheck hitting_tail_check(const IFS& ifs, const SequenceModel& model, const Arc& target, CirclePoint x,
                             std::vector<int> n_grid, int n_trials, std::uint64_t seed, int minimal_letter) {
  if (n_trials < 1) throw Error(ErrorKind::InvalidArgument, "n_trials must be >= 1");
  if (model.alphabet() != ifs.size()) throw Error(ErrorKind::InvalidArgument, "model alphabet differs from IFS size");
  const LiftMap& h = ifs.generator(minimal_letter);
  if (!find_fixed_points(h).empty())
    throw Error(ErrorKind::NoMinimalGenerator, "the designated generator has a fixed point");
  TailCheck tc;
  tc.letter = minimal_letter;
  tc.r = covering_count(h, target);
  tc.ell = tc.r;
  tc.p = model.floor_p();
  if (n_grid.empty())
    for (int j = 1; j <= 10; ++j) n_grid.push_back(j * tc.ell);
  std::sort(n_grid.begin(), n_grid.end());
  n_grid.erase(std::unique(n_grid.begin(), n_grid.end()), n_grid.end());
  if (n_grid.front() < 1) throw Error(ErrorKind::InvalidArgument, "tabulated n must be >= 1");
  const int n_max = n_grid.back();

  // First hitting time in 1..n_max, or n_max + 1 for a miss.
  std::vector<int> hit(static_cast<std::size_t>(n_trials));
  parallel_for(hit.size(), [&](std::size_t i) {
    SequenceStream omega(model, seed, i);
    CirclePoint y = x;
    int t = 1;
    for (; t <= n_max; ++t) {
      y = ifs.generator(omega.letter(static_cast<std::size_t>(t - 1)))(y);
      if (target.contains(y.value())) break;
    }
    hit[i] = t;
  });
  tc.all_ok = true;
  for (int n : n_grid) {
    TailRow row;
    row.n = n;
    double misses = static_cast<double>(std::count_if(hit.begin(), hit.end(), [&](int t) { return t > n; }));
    row.empirical = misses / n_trials;
    row.std_error = std::sqrt(row.empirical * (1.0 - row.empirical) / n_trials);
    row.bound = tail_bound(tc.p, tc.ell, n);
    row.ok = row.empirical <= row.bound + 3.0 * row.std_error;
    tc.all_ok = tc.all_ok && row.ok;
    tc.rows.push_back(row);
  }
  return tc;
}

}  // namespace cifs
