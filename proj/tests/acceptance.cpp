// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "certifier.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "ifs.hpp"
#include "parallel.hpp"
#include "periodic_points.hpp"
#include "synchronization.hpp"

using namespace cifs;

namespace {

constexpr double kGolden = 0.6180339887498949;

const LiftMap g1 = LiftMap::rotation(kGolden);
const LiftMap g2 = LiftMap::sine(0.0, -0.5);

IFS instance() { return IFS({g1, g2}, "golden rotation + sine"); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (time_limit > 0 && secs >= time_limit) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const CertificatePair& certificates() {
  static const CertificatePair pair = certify_robust_minimality(g1, g2);
  return pair;
}

// Smallest r such that the sorted starts of target - j*alpha (j <= r) leave no gap wider than len.
int rotation_cover_oracle(double alpha, double len) {
  std::vector<double> starts;
  for (int r = 1; r < 100000; ++r) {
    starts.push_back(wrap01(-r * alpha));
    std::vector<double> s = starts;
    std::sort(s.begin(), s.end());
    double gap = s.front() + 1.0 - s.back();
    for (std::size_t i = 1; i < s.size(); ++i) gap = std::max(gap, s[i] - s[i - 1]);
    if (gap < len) return r;
  }
  return -1;
}

Outcome composition_order() {
  const IFS ifs = instance();
  CounterRng rng(2024, 0);
  int mismatches = 0;
  for (int i = 0; i < 100; ++i) {
    Word w({}, 2);
    const int len = 1 + static_cast<int>(rng() % 64);
    for (int j = 0; j < len; ++j) w.push_back(1 + static_cast<int>(rng() % 2));
    const CirclePoint x(rng.uniform());
    CirclePoint manual = x;
    for (int a : w.letters()) manual = (a == 1 ? g1 : g2)(manual);
    if (!(branch_apply(ifs, w, x) == manual)) ++mismatches;
  }
  return {mismatches == 0, fmt("%d mismatches over 100 pairs", mismatches)};
}

Outcome certification_end_to_end() {
  const auto& pair = certificates();
  const auto& f = pair.forward;
  const auto& b = pair.backward;
  bool ok = f.margins.all_positive() && b.margins.all_positive() && f.radius > 0 && b.radius > 0;
  ok = ok && check_certificate(f).ok && check_certificate(b).ok;
  const double size = 0.5 * std::min(f.radius, b.radius);
  const auto trials = robustness_trials(pair, size, 20, 7);
  int passed = 0;
  for (const auto& t : trials) passed += t.ok() && t.forward.margins.all_positive() && t.backward.margins.all_positive();
  return {ok && passed == 20,
          fmt("forward lambda %.4f radius %.3g, backward lambda %.4f radius %.3g, %d/20 perturbations of size %.3g pass",
              f.lambda, f.radius, b.lambda, b.radius, passed, size)};
}

Outcome nested_bound() {
  const auto& c = certificates().forward;
  const auto maps = c.cover_maps();
  const Arc& B = c.basin.B;
  const double bound = std::pow(c.lambda, 20) * B.length;
  const CirclePoint y(B.midpoint());
  CounterRng rng(99, 0);
  int violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const CirclePoint x(B.start + rng.uniform() * B.length);
    const auto r = nested_limit(maps, c.basin, c.lambda, x, 20, y);
    const double err = distance(r.approximant, x);
    worst = std::max(worst, err);
    if (err > bound) ++violations;
  }
  return {violations == 0, fmt("max error %.3g vs bound %.3g, %d violations", worst, bound, violations)};
}

Outcome minimality() {
  const IFS ifs = instance();
  const auto f = minimality_estimate(ifs, 0.01, 16, 10000);
  const auto b = minimality_estimate(ifs.inverse_ifs(), 0.01, 16, 10000);
  const IFS single({g2});
  const auto s = minimality_estimate(single, 0.01, 16, 10000);
  const bool ok = f.minimal && b.minimal && !s.minimal && s.witness.has_value();
  return {ok, fmt("forward gap %.4g, backward gap %.4g, single map %s (witness %.4g)", f.worst_gap, b.worst_gap,
                  s.minimal ? "minimal" : "not minimal", s.witness ? s.witness->value() : -1.0)};
}

Outcome synchronization() {
  const auto s = sync_fraction(instance(), SequenceModel::uniform(2), 2000, 500, 1e-3, 1);
  const IFS rot({g1, LiftMap::rotation(0.3)});
  const auto r = sync_fraction(rot, SequenceModel::uniform(2), 2000, 500, 1e-3, 1);
  const double z = sync_z_score(r);
  return {s.sync_fraction >= 0.95 && z <= 3.0,
          fmt("sync fraction %.3f; rotations %.4f vs baseline %.4f (z = %.2f)", s.sync_fraction, r.sync_fraction,
              r.baseline_fraction, z)};
}

Outcome repellers() {
  const IFS ifs = instance();
  const auto det = detect_repellers(ifs, Word(std::vector<int>(5000, 2), 2));
  const bool single = det.ell_hat == 1 && distance(det.points[0], 0.5) < 1e-6;
  std::vector<int> ell(50, -1);
  parallel_for(50, [&](std::size_t s) {
    try {
      ell[s] = detect_repellers(ifs, sample_sequence(SequenceModel::uniform(2), 5000, s)).ell_hat;
    } catch (const Error&) {
      ell[s] = 0;
    }
  });
  const auto ones = std::count(ell.begin(), ell.end(), 1);
  return {single && ones >= 48, fmt("deterministic branch: %d point(s), distance to 1/2 %.2g; ell_hat = 1 in %d/50 runs",
                                    det.ell_hat, det.points.empty() ? 1.0 : distance(det.points[0], 0.5),
                                    static_cast<int>(ones))};
}

Outcome tail() {
  const Arc target(0.3, 0.05);
  const auto t = hitting_tail_check(instance(), SequenceModel::uniform(2), target, 0.0, {}, 10000, 1);
  const int oracle = rotation_cover_oracle(kGolden, target.length);
  bool ok = t.ell == oracle && t.p == 0.5 && !t.rows.empty() && t.rows.back().n == 10 * t.ell;
  int bad = 0;
  for (const auto& row : t.rows) {
    const double limit = std::pow(1 - std::pow(0.5, t.ell), 1 + row.n / t.ell) + 3 * row.std_error;
    if (row.empirical > limit) ++bad;
  }
  return {ok && bad == 0, fmt("ell = %d (oracle %d), %zu rows, %d above the bound", t.ell, oracle, t.rows.size(), bad)};
}

Outcome universal_word() {
  const IFS ifs = instance();
  const Arc target(0.3, 0.05);
  const auto u = find_universal_word(ifs, target, 1000, 500);
  int uncaptured = 0;
  for (int j = 0; j < 10000; ++j)
    if (!capture_time(ifs, u.sigma, target, j / 10000.0)) ++uncaptured;
  // sequences conditioned to contain sigma: a random prefix, then sigma inserted.
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    Word omega = sample_sequence(SequenceModel::uniform(2), 2000, s);
    const std::size_t k = 100 + s * 37;
    Word with = omega.prefix(k);
    with.append(u.sigma);
    with.append(omega.suffix_from(k));
    if (!is_prefix_dense(with, 6)) continue;
    const auto at = find_factor(with, u.sigma);
    if (!at) continue;
    const CirclePoint x(0.0);
    const CirclePoint z = ifs.apply(with.prefix(*at), x);
    const auto t = capture_time(ifs, u.sigma, target, z);
    if (!t) continue;
    hits += target.contains(ifs.apply(with.prefix(*at + *t), x).value());
  }
  const bool ok = u.verified && u.sigma.size() <= 500 && uncaptured == 0 && hits == 20;
  return {ok, fmt("|sigma| = %zu, %d of 10^4 grid points uncaptured, %d/20 orbits enter at the predicted time",
                  u.sigma.size(), uncaptured, hits)};
}

Outcome periodic_density() {
  const auto rep = density_sweep(instance(), 20);
  int bad = 0;
  for (const auto& row : rep.rows) {
    if (!row.record) {
      ++bad;
      continue;
    }
    const auto& r = *row.record;
    const bool attracting = row.cls == "attracting";
    const bool consistent = attracting ? (r.multiplier < 1 && r.stability == FixedPointStability::Attracting)
                                       : (r.multiplier > 1 && r.stability == FixedPointStability::Repelling);
    if (!(r.residual < 1e-9) || !consistent) ++bad;
  }
  return {rep.attracting == 20 && rep.repelling == 20 && bad == 0,
          fmt("attracting %d/20, repelling %d/20, %d inconsistent records", rep.attracting, rep.repelling, bad)};
}

Outcome determinism() {
  const Json base = Json::parse(R"({"schema": 1, "label": "golden rotation + sine",
    "generators": [{"kind": "rotation", "alpha": 0.6180339887498949}, {"kind": "sine", "a": 0.0, "b": -0.5}],
    "model": {"kind": "bernoulli", "weights": [0.5, 0.5]}, "seed": 1})");
  const std::vector<std::pair<std::string, Json>> runs = {
      {"simulate-orbit", {{"length", 2000}}},
      {"estimate-minimality", {{"eps", 0.02}, {"depth", 2000}}},
      {"classify", Json::object()},
      {"detect-repellers", Json::object()},
      {"tail-bound", {{"n_trials", 10000}}},
      {"certify", {{"robustness_trials", 20}}},
      {"universal-word", Json::object()},
      {"find-periodic", Json::object()},
      {"density-sweep", {{"mesh", 20}}},
  };
  std::vector<std::string> differ;
  for (const auto& [cmd, params] : runs) {
    Json cfg = base;
    cfg["params"] = params;
    std::vector<std::string> outs;
    for (int threads : {1, 3, 0}) {
      set_thread_count(threads);
      const auto r = run_command(cmd, cfg, Json::object());
      outs.push_back(std::to_string(r.exit_code) + "\n" + r.output);
    }
    set_thread_count(0);
    outs.push_back(std::to_string(run_command(cmd, cfg, Json::object()).exit_code) + "\n" +
                   run_command(cmd, cfg, Json::object()).output);
    if (!std::all_of(outs.begin(), outs.end(), [&](const std::string& o) { return o == outs[0]; })) differ.push_back(cmd);
  }
  std::ostringstream d;
  d << runs.size() << " commands x 4 runs (threads 1, 3, default, repeat)";
  for (const auto& c : differ) d << "; differs: " << c;
  return {differ.empty(), d.str()};
}

}  // namespace

int main() {
  criterion(1, "composition order", 1.0, composition_order);
  criterion(2, "forward and backward certificates survive perturbation", 60.0, certification_end_to_end);
  criterion(3, "nested-limit bound", 0.0, nested_bound);
  criterion(4, "minimality estimates", 120.0, minimality);
  criterion(5, "synchronization", 0.0, synchronization);
  criterion(6, "repeller detection", 0.0, repellers);
  criterion(7, "hitting-time tail bound", 60.0, tail);
  criterion(8, "universal word", 0.0, universal_word);
  criterion(9, "periodic point density", 0.0, periodic_density);
  criterion(10, "determinism", 0.0, determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
