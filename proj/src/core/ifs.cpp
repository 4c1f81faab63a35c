// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "ifs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <set>

#include "errors.hpp"
#include "parallel.hpp"

namespace cifs {

IFS::IFS(std::vector<LiftMap> generators, std::string label)
    : generators_(std::move(generators)), label_(std::move(label)) {
  if (generators_.empty()) throw Error(ErrorKind::InvalidArgument, "an IFS needs at least one generator");
}

const LiftMap& IFS::generator(int letter) const {
  if (letter < 1 || letter > size()) throw Error(ErrorKind::InvalidArgument, "letter outside the IFS alphabet");
  return generators_[static_cast<std::size_t>(letter - 1)];
}

IFS IFS::inverse_ifs() const {
  std::vector<LiftMap> inv;
  inv.reserve(generators_.size());
  for (const auto& g : generators_) inv.push_back(LiftMap::inverse(g));
  return IFS(std::move(inv), label_.empty() ? std::string("inverse") : label_ + "^-1");
}

void IFS::check_word(const Word& w) const {
  for (int l : w.letters())
    if (l < 1 || l > size()) throw Error(ErrorKind::InvalidArgument, "word letter outside the IFS alphabet");
}

CirclePoint IFS::apply(const Word& w, CirclePoint x) const {
  for (int l : w.letters()) x = generator(l)(x);
  return x;
}

std::vector<CirclePoint> IFS::trajectory(const Word& w, CirclePoint x) const {
  std::vector<CirclePoint> out;
  out.reserve(w.size());
  for (int l : w.letters()) {
    x = generator(l)(x);
    out.push_back(x);
  }
  return out;
}

std::pair<CirclePoint, double> IFS::apply_deriv(const Word& w, CirclePoint x) const {
  double d = 1.0;
  for (int l : w.letters()) {
    auto [y, dy] = generator(l).eval_deriv(x);
    x = y;
    d *= dy;
  }
  return {x, d};
}

CirclePoint IFS::hat_apply(const Word& w, CirclePoint x) const {
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) x = generator(*it)(x);
  return x;
}

CirclePoint IFS::inverse_apply(const Word& w, CirclePoint y) const {
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) y = generator(*it).inverse_eval(y);
  return y;
}

Arc IFS::apply_arc(const Word& w, const Arc& a) const {
  if (a.is_full()) return Arc::full();
  double s = a.start;
  double e = a.start + a.length;
  for (int l : w.letters()) {
    const LiftMap& f = generator(l);
    double fs = f.lift(s);
    double fe = f.lift(e);
    double k = std::floor(fs);
    s = fs - k;
    e = fe - k;
  }
  return Arc(s, std::clamp(e - s, 0.0, 1.0));
}

LiftMap IFS::as_map(const Word& w) const {
  std::vector<LiftMap> parts;
  parts.reserve(w.size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it) parts.push_back(generator(*it));
  return LiftMap::composition(std::move(parts));
}

CirclePoint branch_apply(const IFS& ifs, const Word& w, CirclePoint x) {
  ifs.check_word(w);
  return ifs.apply(w, x);
}

std::vector<HatImage> hat_diameter_decay(const IFS& ifs, const Word& w, int grid_n) {
  if (grid_n < 3) throw Error(ErrorKind::InvalidArgument, "hat_diameter_decay needs grid_n >= 3");
  ifs.check_word(w);
  std::vector<HatImage> out;
  out.reserve(w.size() + 1);
  // The grid arcs [j/N, (j+1)/N] partition S^1, so the total image length
  // telescopes to F(x_0 + 1) - F(x_0) for the lift F of the hat composition.
  auto hat_lift_span = [&](std::size_t n) {
    double s = 0.0, e = 1.0;
    for (std::size_t i = n; i-- > 0;) {
      const LiftMap& f = ifs.generator(w[i]);
      double fs = f.lift(s);
      double fe = f.lift(e);
      double k = std::floor(fs);
      s = fs - k;
      e = fe - k;
    }
    return e - s;
  };
  for (std::size_t n = 0; n <= w.size(); ++n) {
    double len = std::clamp(hat_lift_span(n), 0.0, 1.0);
    out.push_back({n, len, std::min(len, 0.5)});
  }
  return out;
}

namespace {

class DedupSet {
 public:
  explicit DedupSet(double res) : res_(res) {}

  /// Inserts y unless a stored point lies within res (circle metric).
  bool insert(double y) {
    if (near(y) || (y < res_ && near(y + 1.0)) || (y > 1.0 - res_ && near(y - 1.0))) return false;
    set_.insert(y);
    return true;
  }
  std::size_t size() const { return set_.size(); }

 private:
  bool near(double y) const {
    auto it = set_.lower_bound(y - res_);
    return it != set_.end() && *it <= y + res_;
  }

  double res_;
  std::set<double> set_;
};

// BFS over words of length 1..depth; on_new returns true to stop early.
void bfs_orbit(const IFS& ifs, CirclePoint x, int depth, std::size_t cap, double res,
               const std::function<bool(CirclePoint)>& on_new) {
  DedupSet seen(res);
  std::vector<CirclePoint> frontier{x};
  std::size_t count = 0;
  for (int level = 1; level <= depth && !frontier.empty(); ++level) {
    std::vector<CirclePoint> next;
    for (CirclePoint y : frontier) {
      for (int l = 1; l <= ifs.size(); ++l) {
        CirclePoint z = ifs.generator(l)(y);
        if (!seen.insert(z.value())) continue;
        next.push_back(z);
        ++count;
        if (on_new(z) || count >= cap) return;
      }
    }
    frontier = std::move(next);
  }
}

}  // namespace

std::vector<CirclePoint> semigroup_orbit(const IFS& ifs, CirclePoint x, int depth, std::size_t cap, double dedup_res) {
  if (depth < 1) throw Error(ErrorKind::InvalidArgument, "semigroup_orbit needs depth >= 1");
  if (cap < static_cast<std::size_t>(ifs.size())) throw Error(ErrorKind::InvalidArgument, "semigroup_orbit needs cap >= k");
  std::vector<CirclePoint> out;
  bfs_orbit(ifs, x, depth, cap, dedup_res, [&](CirclePoint z) {
    out.push_back(z);
    return false;
  });
  return out;
}

CoverageGrid::CoverageGrid(double eps) : eps_(eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be > 0");
  auto m = static_cast<std::size_t>(std::ceil(2.0 / eps));
  targets_.assign(std::max<std::size_t>(m, 1), false);
}

bool CoverageGrid::mark(double y) {
  const auto m = static_cast<long>(targets_.size());
  const double md = static_cast<double>(m);
  if (2.0 * eps_ >= 1.0) {
    std::fill(targets_.begin(), targets_.end(), true);
    covered_ = targets_.size();
    return true;
  }
  long lo = static_cast<long>(std::ceil((y - eps_) * md));
  long hi = static_cast<long>(std::floor((y + eps_) * md));
  for (long j = lo; j <= hi; ++j) {
    long idx = ((j % m) + m) % m;
    if (targets_[static_cast<std::size_t>(idx)]) continue;
    if (circle_distance(static_cast<double>(idx) / md, y) < eps_) {
      targets_[static_cast<std::size_t>(idx)] = true;
      ++covered_;
    }
  }
  return complete();
}

double CoverageGrid::covering_radius(std::vector<double> points) const {
  if (points.empty()) return 0.5;
  std::sort(points.begin(), points.end());
  const double md = static_cast<double>(targets_.size());
  double worst = 0.0;
  for (std::size_t j = 0; j < targets_.size(); ++j) {
    double t = static_cast<double>(j) / md;
    auto it = std::lower_bound(points.begin(), points.end(), t);
    double up = it == points.end() ? points.front() : *it;
    double down = it == points.begin() ? points.back() : *std::prev(it);
    worst = std::max(worst, std::min(circle_distance(t, up), circle_distance(t, down)));
  }
  return worst;
}

MinimalityReport minimality_estimate(const IFS& ifs, double eps, int start_grid, int depth, std::size_t cap) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be > 0");
  if (start_grid < 1 || depth < 1) throw Error(ErrorKind::InvalidArgument, "start_grid and depth must be >= 1");
  std::vector<double> gaps(static_cast<std::size_t>(start_grid));
  std::vector<char> ok(static_cast<std::size_t>(start_grid));
  parallel_for(static_cast<std::size_t>(start_grid), [&](std::size_t s) {
    CoverageGrid grid(eps);
    std::vector<double> pts;
    CirclePoint x0(static_cast<double>(s) / start_grid);
    bfs_orbit(ifs, x0, depth, cap, kDedupRes, [&](CirclePoint z) {
      pts.push_back(z.value());
      return grid.mark(z.value());
    });
    ok[s] = grid.complete() ? 1 : 0;
    gaps[s] = grid.covering_radius(std::move(pts));
  });
  MinimalityReport r;
  r.start_grid = start_grid;
  r.depth = depth;
  r.eps = eps;
  r.minimal = std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
  double worst_fail = -1.0;
  for (std::size_t s = 0; s < gaps.size(); ++s) {
    r.worst_gap = std::max(r.worst_gap, gaps[s]);
    if (!ok[s] && gaps[s] > worst_fail) {
      worst_fail = gaps[s];
      r.witness = CirclePoint(static_cast<double>(s) / start_grid);
    }
  }
  return r;
}

DensityResult random_orbit_density(const IFS& ifs, const SequenceModel& model, CirclePoint x, double eps, int n_max,
                                   int n_samples, std::uint64_t seed) {
  if (!(eps > 0.0)) throw Error(ErrorKind::InvalidArgument, "eps must be > 0");
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 1");
  if (model.alphabet() != ifs.size()) throw Error(ErrorKind::InvalidArgument, "model alphabet differs from IFS size");
  std::vector<char> dense(static_cast<std::size_t>(n_samples));
  parallel_for(dense.size(), [&](std::size_t i) {
    SequenceStream omega(model, seed, i);
    CoverageGrid grid(eps);
    CirclePoint y = x;
    bool done = false;
    for (int n = 0; n < n_max && !done; ++n) {
      y = ifs.generator(omega.letter(static_cast<std::size_t>(n)))(y);
      done = grid.mark(y.value());
    }
    dense[i] = done ? 1 : 0;
  });
  DensityResult r;
  r.n_samples = n_samples;
  r.seed = seed;
  double hits = static_cast<double>(std::count(dense.begin(), dense.end(), 1));
  r.fraction = hits / n_samples;
  r.std_error = std::sqrt(r.fraction * (1.0 - r.fraction) / n_samples);
  return r;
}

}  // namespace cifs
