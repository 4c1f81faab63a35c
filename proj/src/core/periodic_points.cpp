// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "periodic_points.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"
#include "synchronization.hpp"

namespace cifs {

PeriodicPointRecord make_record(const IFS& ifs, const Word& word, CirclePoint q) {
  ifs.check_word(word);
  PeriodicPointRecord r;
  r.word = word;
  r.point = q;
  CirclePoint x = q;
  double prod = 1.0, logsum = 0.0;
  for (int l : word.letters()) {
    auto [y, d] = ifs.generator(l).eval_deriv(x);
    prod *= d;
    logsum += std::log(d);
    x = y;
  }
  r.residual = distance(x, q);
  r.multiplier = prod;
  r.log_multiplier = logsum;
  if (std::isnormal(prod)) r.stability = classify_multiplier(prod);
  else r.stability = logsum < 0.0 ? FixedPointStability::Attracting : FixedPointStability::Repelling;
  return r;
}

namespace {

// Fixed point of f_w on an arc U with f_w(U) inside U, by bisection on the
// offset from U.start.
CirclePoint bisect_fixed(const IFS& ifs, const Word& w, const Arc& U) {
  auto phi = [&](double t) { return U.offset(ifs.apply(w, CirclePoint(U.start + t)).value()) - t; };
  double lo = 0.0, hi = U.length;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (phi(mid) > 0.0) lo = mid; else hi = mid;
  }
  return CirclePoint(U.start + 0.5 * (lo + hi));
}

// Banach iteration when f_w is a contraction on U; bisection otherwise.
CirclePoint solve_fixed(const IFS& ifs, const Word& w, const Arc& U) {
  constexpr int kProbe = 33;
  double dmax = 0.0;
  for (int j = 0; j < kProbe; ++j) {
    double t = U.length * j / (kProbe - 1);
    dmax = std::max(dmax, std::abs(ifs.apply_deriv(w, CirclePoint(U.start + t)).second));
  }
  if (dmax < 1.0) {
    CirclePoint x(U.midpoint());
    for (int it = 0; it < 2000; ++it) {
      CirclePoint y = ifs.apply(w, x);
      double step = distance(x, y);
      x = y;
      if (step < 1e-16) break;
    }
    if (distance(ifs.apply(w, x), x) <= 1e-13) return x;
  }
  return bisect_fixed(ifs, w, U);
}

Word single(int letter, int k) { return Word({letter}, k); }

}  // namespace

ContractedArc find_contracted_fixed_arc(const IFS& ifs, const Word& omega) {
  ifs.check_word(omega);
  RepellerEstimate rep;
  try {
    rep = detect_repellers(ifs, omega, kDefaultRepellerLevels);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unpolarized) throw;
    throw Error(ErrorKind::HorizonExceeded, std::string("no contracted arc along the prefix: ") + e.what());
  }
  if (rep.points.empty()) throw Error(ErrorKind::HorizonExceeded, "no repeller bracketed along the prefix");
  std::vector<double> r;
  for (auto p : rep.points) r.push_back(p.value());
  std::sort(r.begin(), r.end());
  double gap_min = 1.0;
  for (std::size_t i = 0; i < r.size() && r.size() > 1; ++i) gap_min = std::min(gap_min, wrap01(r[(i + 1) % r.size()] - r[i]));
  const double gap0 = r.size() > 1 ? wrap01(r[1] - r[0]) : 1.0;
  const double eta = std::min(0.05, gap_min / 4.0);
  const Arc U(r[0] + eta, gap0 - 2.0 * eta);

  double s = U.start, e = U.start + U.length;
  for (std::size_t n = 1; n <= omega.size(); ++n) {
    const LiftMap& f = ifs.generator(omega[n - 1]);
    double fs = f.lift(s), fe = f.lift(e);
    double k = std::floor(fs);
    s = fs - k;
    e = fe - k;
    Arc img(s, e - s);
    if (!(img.length < U.length) || !(inclusion_margin(img, U) > 0.0)) continue;
    Word w = omega.prefix(n);
    PeriodicPointRecord rec = make_record(ifs, w, solve_fixed(ifs, w, U));
    if (rec.stability != FixedPointStability::Attracting || rec.residual > kTolFix) continue;
    return {std::move(w), U, rec};
  }
  throw Error(ErrorKind::HorizonExceeded, "no self-mapping arc within the horizon");
}

ContractedArc find_contracted_fixed_arc(const IFS& ifs, const SequenceModel& model, std::uint64_t seed, int horizon) {
  if (horizon < 1) throw Error(ErrorKind::InvalidArgument, "horizon must be >= 1");
  return find_contracted_fixed_arc(ifs, sample_sequence(model, static_cast<std::size_t>(horizon), seed));
}

PeriodicPointRecord periodic_in_interval(const IFS& ifs, const Arc& J, const ContractedArc& attractor,
                                         const PeriodicSearchParams& params) {
  if (!(J.length > 0.0)) throw Error(ErrorKind::InvalidArgument, "J must have positive length");
  const int k = ifs.size();
  const Word& g = attractor.word;
  const CirclePoint a = attractor.record.point;
  const Arc& U = attractor.U;

  // Stage F: a word whose image of J meets the basin U in an arc.
  struct ArcNode {
    Word word;
    Arc img;
  };
  std::optional<ArcNode> f_hit;
  std::optional<Arc> meet;
  {
    std::deque<ArcNode> queue{{Word({}, k), J}};
    std::size_t nodes = 1;
    while (!queue.empty() && !f_hit) {
      ArcNode node = std::move(queue.front());
      queue.pop_front();
      auto inter = intersection(node.img, U);
      if (inter && inter->length > 1e-12) {
        meet = inter;
        f_hit = std::move(node);
        break;
      }
      if (static_cast<int>(node.word.size()) >= params.depth_f) continue;
      for (int l = 1; l <= k && nodes < params.node_cap; ++l, ++nodes) {
        Word w = node.word;
        w.push_back(l);
        queue.push_back({std::move(w), ifs.apply_arc(single(l, k), node.img)});
      }
    }
  }
  if (!f_hit) throw Error(ErrorKind::SearchExhausted, "stage F: no word maps J onto the basin within the depth cap");
  const Word& F = f_hit->word;
  const Arc W = meet->shrunk(0.1 * meet->length);
  const Arc V = Arc::between(ifs.inverse_apply(F, W.start).value(), ifs.inverse_apply(F, W.end_point()).value());

  // Stage G: a word sending the attractor a well inside V.
  std::optional<Word> G;
  {
    std::deque<std::pair<Word, CirclePoint>> queue{{Word({}, k), a}};
    std::size_t nodes = 1;
    while (!queue.empty()) {
      auto [w, y] = std::move(queue.front());
      queue.pop_front();
      double o = V.offset(y.value());
      if (o > 0.1 * V.length && o < 0.9 * V.length) {
        G = std::move(w);
        break;
      }
      if (static_cast<int>(w.size()) >= params.depth_g) continue;
      for (int l = 1; l <= k && nodes < params.node_cap; ++l, ++nodes) {
        Word next = w;
        next.push_back(l);
        queue.push_back({std::move(next), ifs.generator(l)(y)});
      }
    }
  }
  if (!G) throw Error(ErrorKind::SearchExhausted, "stage G: no word sends the attractor into V within the depth cap");

  const Arc pre = Arc::between(ifs.inverse_apply(*G, V.start).value(), ifs.inverse_apply(*G, V.end_point()).value());
  const double oa = pre.offset(a.value());
  const double delta = 0.5 * std::min(oa, pre.length - oa);
  const Arc N(a.value() - delta, 2.0 * delta);

  // Stage m: g^m(F(V)) inside the delta-neighbourhood of a.
  Arc X = ifs.apply_arc(F, V);
  int m = 0;
  while (!(inclusion_margin(X, N) > 0.0)) {
    if (++m > params.m_max) throw Error(ErrorKind::SearchExhausted, "stage m: iterates of g do not shrink F(V) onto a");
    X = ifs.apply_arc(g, X);
  }
  m += 2;

  Word H = F;
  for (int i = 0; i < m; ++i) H.append(g);
  H.append(*G);
  if (!(inclusion_margin(ifs.apply_arc(H, V), V) > 0.0))
    throw Error(ErrorKind::VerificationFailed, "G g^m F does not map V into itself");
  return make_record(ifs, H, solve_fixed(ifs, H, V));
}

PeriodicPointRecord repelling_in_interval(const IFS& ifs, const Arc& J, const ContractedArc& inverse_attractor,
                                          const PeriodicSearchParams& params) {
  PeriodicPointRecord inv = periodic_in_interval(ifs.inverse_ifs(), J, inverse_attractor, params);
  PeriodicPointRecord r = make_record(ifs, inv.word.reversed(), inv.point);
  r.residual = inv.residual;
  return r;
}

SweepReport density_sweep(const IFS& ifs, int mesh, const SweepParams& params) {
  if (mesh < 1) throw Error(ErrorKind::InvalidArgument, "mesh must be >= 1");
  const SequenceModel model = params.model ? *params.model : SequenceModel::uniform(ifs.size());
  SweepReport rep;
  rep.mesh = mesh;
  std::optional<ContractedArc> fwd, bwd;
  try {
    fwd = find_contracted_fixed_arc(ifs, model, params.seed, params.horizon);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("forward attractor: ") + e.what());
  }
  try {
    bwd = find_contracted_fixed_arc(ifs.inverse_ifs(), model, params.seed, params.horizon);
  } catch (const Error& e) {
    rep.notes.push_back(std::string("backward attractor: ") + e.what());
  }
  rep.rows.resize(2 * static_cast<std::size_t>(mesh));
  parallel_for(rep.rows.size(), [&](std::size_t i) {
    SweepRow& row = rep.rows[i];
    row.arc_index = static_cast<int>(i / 2);
    const bool attracting = i % 2 == 0;
    row.cls = attracting ? "attracting" : "repelling";
    const Arc J(static_cast<double>(row.arc_index) / mesh, 1.0 / mesh);
    const auto& attr = attracting ? fwd : bwd;
    if (!attr) {
      row.error = "no contracted arc";
      return;
    }
    try {
      PeriodicPointRecord rec = attracting ? periodic_in_interval(ifs, J, *attr, params.search)
                                           : repelling_in_interval(ifs, J, *attr, params.search);
      auto want = attracting ? FixedPointStability::Attracting : FixedPointStability::Repelling;
      row.found = J.contains(rec.point.value()) && rec.residual <= kTolFix && rec.stability == want;
      if (!row.found) row.error = "record failed the acceptance checks";
      row.record = std::move(rec);
    } catch (const Error& e) {
      row.error = e.what();
    }
  });
  for (const auto& row : rep.rows)
    if (row.found) ++(row.cls == "attracting" ? rep.attracting : rep.repelling);
  return rep;
}

}  // namespace cifs
