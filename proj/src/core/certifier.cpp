// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "certifier.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace cifs {

namespace {

// Cover thresholds tried from strict to loose, as fractions of the available slack.
constexpr double kTaus[] = {0.25, 0.1, 0.05, 0.02, 0.0};

bool needs_solve(const LiftMap& f) {
  switch (f.kind()) {
    case LiftMap::Kind::Rotation:
    case LiftMap::Kind::Sine: return false;
    case LiftMap::Kind::Inverse: return true;
    case LiftMap::Kind::Power: return f.exponent() < 0 || needs_solve(f.base());
    case LiftMap::Kind::Composition:
      return std::any_of(f.parts().begin(), f.parts().end(), [](const LiftMap& p) { return needs_solve(p); });
  }
  return true;
}

// Signed offset of x from the start of a, in (-1/2, 1/2].
double signed_offset(const Arc& a, double x) {
  double o = a.offset(x);
  return o > 0.5 ? o - 1.0 : o;
}

void require_irrational_rotation(const LiftMap& g1) {
  if (!g1.is_rotation()) throw Error(ErrorKind::PreconditionViolation, "g1 must be a rotation");
  if (is_near_rational(g1.alpha()))
    throw Error(ErrorKind::PreconditionViolation, "g1 has a (numerically) rational rotation number");
}

// Lipschitz-inflated grid maximum of Dh over the zone.
double contraction_bound(const std::vector<LiftMap>& h_list, const Arc& zone, int grid_n) {
  if (grid_n < 1) throw Error(ErrorKind::InvalidArgument, "grid_n must be >= 1");
  const double step = zone.length / grid_n;
  std::vector<double> per_map(h_list.size());
  parallel_for(h_list.size(), [&](std::size_t i) {
    const LiftMap& h = h_list[i];
    const double c = h.bounds().max_d2;
    double prev = h.deriv(zone.start);
    double lam = 0.0;
    for (int j = 1; j <= grid_n; ++j) {
      double cur = h.deriv(zone.start + j * step);
      lam = std::max(lam, 0.5 * (prev + cur + c * step));
      prev = cur;
    }
    per_map[i] = lam;
  });
  return per_map.empty() ? 1.0 : *std::max_element(per_map.begin(), per_map.end());
}

struct Letter {
  double m1, m2, k0, k1;
};

// Error factors of one letter under a size-rho perturbation of the original
// map; `via_inverse` marks letters that are inverses of the perturbed map.
Letter make_letter(const LiftMap& f, bool via_inverse, double rho_cap) {
  DerivBounds b = f.bounds();
  Letter l{b.max_d1, b.max_d2, 1.0, 1.0};
  if (via_inverse) {
    l.k0 = b.max_d1;
    l.k1 = 1.01 * (b.max_d1 + b.max_d2);
  }
  l.m1 += l.k1 * rho_cap;
  return l;
}

double c0_factor(const std::vector<Letter>& seq) {
  double sum = 0.0, prod = 1.0;
  for (auto it = seq.rbegin(); it != seq.rend(); ++it) {
    sum += it->k0 * prod;
    prod *= it->m1;
  }
  return sum;
}

double c1_factor(const std::vector<Letter>& seq) {
  double total = 1.0;
  for (const Letter& l : seq) total *= l.m1;
  double inner = 0.0, sum = 0.0;
  for (const Letter& l : seq) {
    sum += (l.k1 + l.m2 * inner) * total / l.m1;
    inner = inner * l.m1 + l.k0;
  }
  return sum;
}

std::vector<Letter> repeat(const Letter& l, long n) { return std::vector<Letter>(static_cast<std::size_t>(n), l); }

}  // namespace

BasinData locate_basin(const LiftMap& g2, double m_deriv, int grid_n) {
  if (!(m_deriv > 0.0 && m_deriv < 1.0)) throw Error(ErrorKind::InvalidArgument, "m_deriv must be in (0, 1)");
  if (grid_n < 16) throw Error(ErrorKind::InvalidArgument, "grid_n must be >= 16");
  if (g2.is_rotation()) throw Error(ErrorKind::NoAttractingSide, "g2 is a rotation");
  auto fps = find_fixed_points(g2);
  if (fps.empty()) throw Error(ErrorKind::NoAttractingSide, "g2 has no fixed point");
  double best_eps = 0.0, best_dmax = 0.0;
  CirclePoint best_p;
  for (std::size_t i = 0; i < fps.size(); ++i) {
    double p = fps[i].point.value();
    double gap = fps.size() == 1 ? 1.0 : wrap01(fps[(i + 1) % fps.size()].point.value() - p);
    int last = 0;
    double dmax = 0.0;
    for (int j = 1; static_cast<double>(j) / grid_n < gap; ++j) {
      double d = g2.deriv(p + static_cast<double>(j) / grid_n);
      if (!(d > 0.0 && d <= 1.0 - m_deriv)) break;
      last = j;
      dmax = std::max(dmax, d);
    }
    double eps = static_cast<double>(last) / grid_n;
    if (eps > best_eps) {
      best_eps = eps;
      best_p = fps[i].point;
      best_dmax = dmax;
    }
  }
  if (best_eps <= 0.0) throw Error(ErrorKind::NoAttractingSide, "no fixed point has a right-sided contracting basin");

  const double p = best_p.value();
  const double eps = best_eps;
  Arc A(p, eps);
  auto off = [&](double x) { return A.offset(g2(CirclePoint(x)).value()); };
  double e1 = off(p + eps);
  double e2 = off(p + e1);
  double e3 = off(p + e2);
  double upper = std::min(eps - e1, e2 - e3);
  if (!(upper > 0.0)) throw Error(ErrorKind::NoAttractingSide, "basin too small for an admissible delta");
  BasinData b;
  b.p = best_p;
  b.eps = eps;
  b.delta = 0.5 * upper;
  b.A = A;
  b.B = Arc(p + e2, e1 - e2);
  b.D = Arc(p, e1);
  b.zone = Arc(p + b.delta, eps - b.delta);
  b.deriv_max = best_dmax;
  return b;
}

LiftMap cover_map(const LiftMap& g1, const LiftMap& g2, long n) {
  return LiftMap::composition({LiftMap::power(g1, n), g2});
}

CoverWords search_cover_words(const LiftMap& g1, const LiftMap& g2, const BasinData& basin, long n_max) {
  require_irrational_rotation(g1);
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 1");
  const Arc& B = basin.B;
  if (B.is_full() || !(B.length > 0.0))
    throw Error(ErrorKind::PreconditionViolation, "degenerate basin arc B: a homeomorphism image of a proper arc is proper");
  const auto n = static_cast<std::size_t>(n_max);
  std::vector<Arc> hb(n);
  std::vector<double> m2(n);
  parallel_for(n, [&](std::size_t i) {
    long e = static_cast<long>(i) + 1;
    LiftMap h = cover_map(g1, g2, e);
    hb[i] = image(h, B);
    double d_in = inclusion_margin(image(LiftMap::power(g1, e), basin.D), basin.zone);
    double z_in = inclusion_margin(image(h, basin.zone), basin.zone);
    m2[i] = std::min(d_in, z_in);
  });
  const double slack = basin.zone.length - basin.D.length;
  double reached = 0.0;
  for (double tau : kTaus) {
    const double thr = tau * 0.5 * slack;
    const double mu = tau * 0.5 * hb[0].length;
    std::vector<std::size_t> chosen;
    double frontier = -mu;
    bool done = false;
    while (!done) {
      // Smallest exponent that achieves half of the best possible extension.
      auto end_of = [&](std::size_t i) {
        if (!(m2[i] > thr)) return frontier;
        double s = signed_offset(B, hb[i].start);
        if (!(s + mu < frontier)) return frontier;
        return s + hb[i].length - mu;
      };
      double reach = frontier;
      for (std::size_t i = 0; i < n; ++i) reach = std::max(reach, end_of(i));
      if (!(reach > frontier)) break;
      std::size_t best = 0;
      while (!(end_of(best) >= frontier + 0.5 * (reach - frontier))) ++best;
      double best_end = end_of(best);
      chosen.push_back(best);
      frontier = best_end;
      done = frontier > B.length + mu;
    }
    reached = std::max(reached, frontier);
    if (!done) continue;
    std::sort(chosen.begin(), chosen.end());
    CoverWords cw;
    std::vector<Arc> arcs;
    cw.m2 = 1.0;
    for (std::size_t i : chosen) {
      long e = static_cast<long>(i) + 1;
      cw.exponents.push_back(e);
      cw.maps.push_back(cover_map(g1, g2, e));
      arcs.push_back(hb[i]);
      cw.m2 = std::min(cw.m2, m2[i]);
    }
    cw.m1 = cover_margin(arcs, B);
    if (cw.m1 > 0.0 && cw.m2 > 0.0) return cw;
  }
  std::ostringstream msg;
  msg << "no family with n <= " << n_max << " covers B; best partial cover reaches " << reached << " of " << B.length;
  throw Error(ErrorKind::SearchExhausted, msg.str());
}

double verify_contraction(const std::vector<LiftMap>& h_list, const BasinData& basin, int grid_n) {
  if (h_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty map list");
  double lam = contraction_bound(h_list, basin.zone, grid_n);
  if (!(lam < 1.0)) {
    std::ostringstream msg;
    msg << "inflated derivative bound " << lam << " >= 1";
    throw Error(ErrorKind::ContractionFails, msg.str());
  }
  return lam;
}

namespace {

// Greedy circle cover by g1^{sign m}(B), m = 0..n_max, anchored at m = 0.
std::pair<std::vector<long>, double> rotation_cover(const LiftMap& g1, const Arc& B, long n_max, int sign) {
  const auto n = static_cast<std::size_t>(n_max) + 1;
  std::vector<Arc> arcs(n);
  std::vector<double> off(n);
  parallel_for(n, [&](std::size_t m) {
    arcs[m] = image(LiftMap::power(g1, sign * static_cast<long>(m)), B);
    off[m] = B.offset(arcs[m].start);
  });
  off[0] = 0.0;
  for (double tau : kTaus) {
    const double mu = tau * 0.5 * B.length;
    std::vector<std::size_t> chosen{0};
    double frontier = arcs[0].length - mu;
    bool done = false;
    while (!done) {
      auto end_of = [&](std::size_t m) {
        if (!(off[m] + mu < frontier)) return frontier;
        return off[m] + arcs[m].length - mu;
      };
      double reach = frontier;
      for (std::size_t m = 1; m < n; ++m) reach = std::max(reach, end_of(m));
      if (!(reach > frontier)) break;
      std::size_t best = 1;
      while (!(end_of(best) >= frontier + 0.5 * (reach - frontier))) ++best;
      double best_end = end_of(best);
      chosen.push_back(best);
      frontier = best_end;
      done = frontier > 1.0 + mu;
    }
    if (!done) continue;
    std::sort(chosen.begin(), chosen.end());
    std::vector<Arc> picked;
    std::vector<long> exps;
    for (std::size_t m : chosen) {
      exps.push_back(static_cast<long>(m));
      picked.push_back(arcs[m]);
    }
    double margin = cover_margin(picked, Arc::full());
    if (margin > 0.0) return {exps, margin};
  }
  throw Error(ErrorKind::SearchExhausted, "rotated copies of B do not cover the circle within n_max");
}

}  // namespace

GlobalCover verify_global_cover(const LiftMap& g1, const Arc& B, long n_max) {
  if (B.is_full()) return {{0}, {0}, 1.0};
  if (!(B.length > 0.0)) throw Error(ErrorKind::InvalidArgument, "B must have positive length");
  if (n_max < 0) throw Error(ErrorKind::InvalidArgument, "n_max must be >= 0");
  require_irrational_rotation(g1);
  GlobalCover gc;
  auto [t, mt] = rotation_cover(g1, B, n_max, +1);
  auto [s, ms] = rotation_cover(g1, B, n_max, -1);
  gc.T = std::move(t);
  gc.S = std::move(s);
  gc.m4 = std::min(mt, ms);
  return gc;
}

std::vector<LiftMap> Certificate::cover_maps() const {
  std::vector<LiftMap> out;
  LiftMap g2e = g2_effective();
  for (long e : cover_exponents) out.push_back(cover_map(g1, g2e, e));
  return out;
}

Verification verify_frozen(const Certificate& c, const std::optional<std::pair<LiftMap, LiftMap>>& generators,
                           double c_safety, double radius_cap) {
  const LiftMap g1 = generators ? generators->first : c.g1;
  const LiftMap g2 = generators ? generators->second : c.g2;
  const LiftMap g2e = LiftMap::power(g2, c.g2_power);
  const BasinData& b = c.basin;
  Verification v;
  if (c.cover_exponents.empty()) {
    v.problems.push_back("no cover words");
    return v;
  }
  const double solve1 = needs_solve(g1) ? kTolInv : 0.0;
  const double solve1_inv = needs_solve(LiftMap::inverse(g1)) ? kTolInv : 0.0;
  const double solve2 = needs_solve(g2) ? kTolInv * c.g2_power : 0.0;

  std::vector<LiftMap> hs;
  std::vector<Arc> hb;
  double m2 = 1.0, infl_h = 0.0;
  for (long e : c.cover_exponents) {
    LiftMap h = cover_map(g1, g2e, e);
    hb.push_back(image(h, b.B));
    double infl = solve2 + solve1 * static_cast<double>(e);
    infl_h = std::max(infl_h, infl);
    double d_in = inclusion_margin(image(LiftMap::power(g1, e), b.D), b.zone) - solve1 * static_cast<double>(e);
    double z_in = inclusion_margin(image(h, b.zone), b.zone) - infl;
    m2 = std::min({m2, d_in, z_in});
    hs.push_back(std::move(h));
  }
  v.margins.m1 = cover_margin(hb, b.B) - infl_h;
  v.margins.m2 = m2;
  v.lambda = contraction_bound(hs, b.zone, c.grid_n);
  v.margins.m3 = 1.0 - v.lambda;

  std::vector<Arc> t_arcs, s_arcs;
  double infl_t = 0.0, infl_s = 0.0;
  for (long m : c.global_cover.T) {
    t_arcs.push_back(image(LiftMap::power(g1, m), b.B));
    infl_t = std::max(infl_t, solve1 * static_cast<double>(m));
  }
  for (long m : c.global_cover.S) {
    s_arcs.push_back(image(LiftMap::power(g1, -m), b.B));
    infl_s = std::max(infl_s, solve1_inv * static_cast<double>(m));
  }
  if (t_arcs.empty() || s_arcs.empty()) {
    v.problems.push_back("empty global cover");
    v.margins.m4 = -1.0;
  } else {
    v.margins.m4 = std::min(cover_margin(t_arcs, Arc::full()) - infl_t, cover_margin(s_arcs, Arc::full()) - infl_s);
  }
  v.margins.basin = inclusion_margin(b.B, b.zone);

  // Error amplification over the letters of every certified composition.
  const bool inv = c.direction == "backward";
  Letter l1 = make_letter(c.g1, inv, radius_cap);
  Letter l1_inv = make_letter(LiftMap::inverse(c.g1), !inv, radius_cap);
  Letter l2 = make_letter(c.g2, inv, radius_cap);
  double a0 = 0.0, a1 = 0.0;
  for (long e : c.cover_exponents) {
    std::vector<Letter> seq = repeat(l2, c.g2_power);
    auto rot = repeat(l1, e);
    seq.insert(seq.end(), rot.begin(), rot.end());
    a0 = std::max(a0, c0_factor(seq));
    a1 = std::max(a1, c1_factor(seq));
  }
  for (long m : c.global_cover.T) a0 = std::max(a0, c0_factor(repeat(l1, m)));
  for (long m : c.global_cover.S) a0 = std::max(a0, c0_factor(repeat(l1_inv, m)));
  v.amplification = {a0, a1};
  double slack = std::min({v.margins.m1 / a0, v.margins.m2 / a0, v.margins.m4 / a0, v.margins.m3 / a1});
  v.radius = std::min(radius_cap, c_safety * slack);

  if (!(v.margins.m1 > 0)) v.problems.push_back("condition (1) cover margin is not positive");
  if (!(v.margins.m2 > 0)) v.problems.push_back("condition (2) inclusion margin is not positive");
  if (!(v.lambda < 1.0)) v.problems.push_back("condition (3) lambda >= 1");
  if (!(v.margins.m4 > 0)) v.problems.push_back("condition (4) global cover margin is not positive");
  if (!(v.margins.basin > 0)) v.problems.push_back("B is not inside the zone");
  if (!(v.radius > 0)) v.problems.push_back("radius is not positive");
  v.ok = v.problems.empty();
  return v;
}

Verification check_certificate(const Certificate& c) {
  Verification v = verify_frozen(c);
  auto near = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
  auto expect = [&](const char* what, double stored, double computed) {
    if (!near(stored, computed)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << what << ": stored " << stored << ", recomputed " << computed;
      v.problems.push_back(msg.str());
    }
  };
  if (!(c.lambda < 1.0)) v.problems.push_back("stored lambda >= 1");
  if (!c.margins.all_positive()) v.problems.push_back("a stored margin is not positive");
  if (!(c.radius > 0.0)) v.problems.push_back("stored radius is not positive");
  expect("lambda", c.lambda, v.lambda);
  expect("m1", c.margins.m1, v.margins.m1);
  expect("m2", c.margins.m2, v.margins.m2);
  expect("m3", c.margins.m3, v.margins.m3);
  expect("m4", c.margins.m4, v.margins.m4);
  expect("basin margin", c.margins.basin, v.margins.basin);
  expect("radius", c.radius, v.radius);
  // The basin arcs must come from the stored g2.
  const LiftMap g2e = c.g2_effective();
  const BasinData& b = c.basin;
  double e1 = b.A.offset(g2e(CirclePoint(b.p.value() + b.eps)).value());
  double e2 = b.A.offset(g2e(CirclePoint(b.p.value() + e1)).value());
  expect("B start", b.B.start, wrap01(b.p.value() + e2));
  expect("B length", b.B.length, e1 - e2);
  expect("D length", b.D.length, e1);
  expect("zone start", b.zone.start, wrap01(b.p.value() + b.delta));
  expect("zone length", b.zone.length, b.eps - b.delta);
  v.ok = v.problems.empty();
  return v;
}

Certificate certify_direction(const LiftMap& g1_in, const LiftMap& g2_in, const std::string& direction,
                              const CertifyParams& params) {
  require_irrational_rotation(g1_in);
  // Find an iterate of g2 with an attracting side, flipping the coordinate when
  // only a left-sided basin exists.
  std::optional<BasinData> basin;
  bool flipped = false;
  int power = 1;
  std::string last_error = "g2 has no attracting fixed point in any tested iterate";
  if (g2_in.is_rotation()) throw Error(ErrorKind::NoAttractingSide, "g2 is a rotation");
  for (int r = 1; r <= params.max_g2_power && !basin; ++r) {
    LiftMap g2r = LiftMap::power(g2_in, r);
    for (bool flip : {false, true}) {
      try {
        basin = locate_basin(flip ? g2r.flipped() : g2r, params.m_deriv, params.basin_grid_n);
        flipped = flip;
        power = r;
        break;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoAttractingSide) throw;
        last_error = e.what();
      }
    }
  }
  if (!basin) throw Error(ErrorKind::NoAttractingSide, last_error);

  Certificate c;
  c.direction = direction;
  c.flipped = flipped;
  c.g1 = flipped ? g1_in.flipped() : g1_in;
  c.g2 = flipped ? g2_in.flipped() : g2_in;
  c.g2_power = power;
  c.basin = *basin;
  c.grid_n = params.grid_n;
  const LiftMap g2e = c.g2_effective();
  CoverWords cw = search_cover_words(c.g1, g2e, c.basin, params.n_max);
  c.cover_exponents = cw.exponents;
  verify_contraction(cw.maps, c.basin, params.grid_n);
  c.global_cover = verify_global_cover(c.g1, c.basin.B, params.global_n_max);

  Verification v = verify_frozen(c, std::nullopt, params.c_safety, params.radius_cap);
  if (!v.ok) {
    std::string msg = "certificate does not verify:";
    for (const auto& p : v.problems) msg += " " + p + ";";
    throw Error(ErrorKind::VerificationFailed, msg);
  }
  c.lambda = v.lambda;
  c.margins = v.margins;
  c.amplification = v.amplification;
  c.radius = v.radius;
  return c;
}

CertificatePair certify_robust_minimality(const LiftMap& g1, const LiftMap& g2, const CertifyParams& params) {
  CertificatePair pair;
  pair.forward = certify_direction(g1, g2, "forward", params);
  pair.backward = certify_direction(LiftMap::inverse(g1), LiftMap::inverse(g2), "backward", params);
  return pair;
}

LiftMap perturb_map(const LiftMap& g, double size, CounterRng& rng) {
  if (!(size >= 0.0)) throw Error(ErrorKind::InvalidArgument, "perturbation size must be >= 0");
  if (size == 0.0) return g;
  int freq = 1 + static_cast<int>(rng() % 3);
  double phase = rng.uniform();
  double a = 2.0 * rng.uniform() - 1.0;
  double b = 2.0 * rng.uniform() - 1.0;
  const double m1 = g.bounds().max_d1;
  // C^0 size |a| + |b|/(2 pi n), C^1 size |b| sup Dg.
  double c0 = std::abs(a) + std::abs(b) / (2.0 * std::numbers::pi * freq);
  double c1 = std::abs(b) * m1;
  double s = size / std::max(c0, c1);
  return LiftMap::composition({LiftMap::sine(s * a, s * b, freq, phase), g});
}

Verification verify_perturbed(const Certificate& c, const LiftMap& g1, const LiftMap& g2) {
  const bool backward = c.direction == "backward";
  auto orient = [&](const LiftMap& m) {
    LiftMap d = backward ? LiftMap::inverse(m) : m;
    return c.flipped ? d.flipped() : d;
  };
  return verify_frozen(c, std::pair{orient(g1), orient(g2)});
}

std::vector<RobustnessTrial> robustness_trials(const CertificatePair& pair, double size, int n_trials,
                                               std::uint64_t seed) {
  if (n_trials < 0) throw Error(ErrorKind::InvalidArgument, "n_trials must be >= 0");
  const Certificate& f = pair.forward;
  const LiftMap g1 = f.flipped ? f.g1.flipped() : f.g1;
  const LiftMap g2 = f.flipped ? f.g2.flipped() : f.g2;
  std::vector<RobustnessTrial> out(static_cast<std::size_t>(n_trials));
  parallel_for(out.size(), [&](std::size_t i) {
    CounterRng rng(seed, i);
    LiftMap p1 = perturb_map(g1, size, rng);
    LiftMap p2 = perturb_map(g2, size, rng);
    out[i] = {size, verify_perturbed(f, p1, p2), verify_perturbed(pair.backward, p1, p2)};
  });
  return out;
}

NestedLimit nested_limit(const std::vector<LiftMap>& h_list, const BasinData& basin, double lambda, CirclePoint x,
                         int n_levels, std::optional<CirclePoint> y) {
  if (n_levels < 0) throw Error(ErrorKind::InvalidArgument, "n_levels must be >= 0");
  if (h_list.empty()) throw Error(ErrorKind::InvalidArgument, "empty map list");
  const Arc& B = basin.B;
  constexpr double kClosedTol = 1e-13;
  auto in_closed = [&](const Arc& a, double z) {
    double o = a.offset(z);
    return o <= a.length + kClosedTol || o >= 1.0 - kClosedTol;
  };
  if (!in_closed(B, x.value())) throw Error(ErrorKind::InvalidArgument, "x must lie in closure(B)");
  std::vector<Arc> hb;
  for (const auto& h : h_list) hb.push_back(image(h, B));
  NestedLimit out;
  out.indices = Word({}, static_cast<int>(h_list.size()));
  double z = x.value();
  for (int level = 0; level < n_levels; ++level) {
    std::size_t j = 0;
    while (j < hb.size() && !in_closed(hb[j], z)) ++j;
    if (j == hb.size()) {
      std::ostringstream msg;
      msg << "no h_i(B) contains the point at level " << level + 1;
      throw Error(ErrorKind::CoverGap, msg.str());
    }
    out.indices.push_back(static_cast<int>(j) + 1);
    z = h_list[j].inverse_eval(z).value();
  }
  CirclePoint a = y.value_or(CirclePoint(B.midpoint()));
  for (auto it = out.indices.letters().rbegin(); it != out.indices.letters().rend(); ++it)
    a = h_list[static_cast<std::size_t>(*it - 1)](a);
  out.approximant = a;
  out.bound = std::pow(lambda, n_levels) * B.length;
  out.error = distance(a, x);
  out.within_bound = out.error <= out.bound + kTolInv * (n_levels + 1);
  return out;
}

std::optional<std::size_t> capture_time(const IFS& ifs, const Word& sigma, const Arc& target, CirclePoint z) {
  if (target.contains(z.value())) return 0;
  for (std::size_t t = 0; t < sigma.size(); ++t) {
    z = ifs.generator(sigma[t])(z);
    if (target.contains(z.value())) return t + 1;
  }
  return std::nullopt;
}

namespace {

constexpr int kSuffixDepth = 10;

struct Suffix {
  std::vector<int> letters;
  std::size_t captures = 0;
};

// Depth-first over suffix words; best = most captures per letter, then shorter,
// then lexicographically first.
void suffix_search(const IFS& ifs, const Arc& goal, const std::vector<double>& pts, std::vector<int>& word,
                   std::size_t captured, Suffix& best) {
  for (int l = 1; l <= ifs.size(); ++l) {
    const LiftMap& g = ifs.generator(l);
    std::vector<double> rest;
    rest.reserve(pts.size());
    std::size_t cap = captured;
    for (double y : pts) {
      double z = g(CirclePoint(y)).value();
      if (goal.contains(z)) ++cap;
      else rest.push_back(z);
    }
    word.push_back(l);
    const std::size_t len = word.size(), blen = best.letters.size();
    bool better = false;
    if (cap > 0) {
      if (best.captures == 0) better = true;
      else if (cap * blen > best.captures * len) better = true;
      else if (cap * blen == best.captures * len && len < blen) better = true;
    }
    if (better) best = {word, cap};
    if (len < kSuffixDepth && !rest.empty()) suffix_search(ifs, goal, rest, word, cap, best);
    word.pop_back();
  }
}

}  // namespace

UniversalWord find_universal_word(const IFS& ifs, const Arc& target, int z_grid, int max_len) {
  if (z_grid < 1 || max_len < 0) throw Error(ErrorKind::InvalidArgument, "need z_grid >= 1 and max_len >= 0");
  if (!(target.length > 0.0)) throw Error(ErrorKind::InvalidArgument, "target must have positive length");
  UniversalWord uw;
  uw.sigma = Word({}, ifs.size());
  uw.fine_grid = static_cast<std::size_t>(z_grid) * 10;
  uw.capture_times.assign(static_cast<std::size_t>(z_grid), 0);
  if (target.is_full()) {
    uw.verified = true;
    return uw;
  }
  const Arc goal = target.shrunk(0.1 * target.length);

  struct Tracked {
    std::size_t coarse;  // index into capture_times, or npos for fine-grid additions
    double y;
  };
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::vector<Tracked> alive;
  for (int j = 0; j < z_grid; ++j) {
    double z = static_cast<double>(j) / z_grid;
    if (!goal.contains(z)) alive.push_back({static_cast<std::size_t>(j), z});
  }

  auto fail_length = [&](const std::string& why) {
    std::ostringstream msg;
    msg << why << "; " << alive.size() << " grid points survive, e.g. near";
    for (std::size_t i = 0; i < std::min<std::size_t>(alive.size(), 5); ++i) msg << ' ' << alive[i].y;
    throw Error(ErrorKind::LengthExceeded, msg.str());
  };

  for (;;) {
    while (!alive.empty()) {
      std::vector<double> pts;
      for (const auto& a : alive) pts.push_back(a.y);
      Suffix best;
      std::vector<int> word;
      suffix_search(ifs, goal, pts, word, 0, best);
      if (best.captures == 0) fail_length("no short suffix captures a surviving point");
      if (uw.sigma.size() + best.letters.size() > static_cast<std::size_t>(max_len))
        fail_length("the word would exceed max_len");
      const std::size_t base = uw.sigma.size();
      std::vector<Tracked> next;
      for (auto a : alive) {
        bool hit = false;
        for (std::size_t t = 0; t < best.letters.size(); ++t) {
          a.y = ifs.generator(best.letters[t])(CirclePoint(a.y)).value();
          if (goal.contains(a.y)) {
            if (a.coarse != npos) uw.capture_times[a.coarse] = static_cast<int>(base + t + 1);
            hit = true;
            break;
          }
        }
        if (!hit) next.push_back(a);  // carries its image under the whole suffix
      }
      alive = std::move(next);
      for (int l : best.letters) uw.sigma.push_back(l);
    }
    // Verify against the unshrunk target on a finer grid.
    std::vector<char> fail(uw.fine_grid);
    parallel_for(uw.fine_grid, [&](std::size_t j) {
      CirclePoint z(static_cast<double>(j) / static_cast<double>(uw.fine_grid));
      fail[j] = capture_time(ifs, uw.sigma, target, z) ? 0 : 1;
    });
    for (std::size_t j = 0; j < fail.size(); ++j)
      if (fail[j])
        alive.push_back({npos, ifs.apply(uw.sigma, CirclePoint(static_cast<double>(j) / uw.fine_grid)).value()});
    if (alive.empty()) break;
  }
  uw.verified = true;
  return uw;
}

}  // namespace cifs
