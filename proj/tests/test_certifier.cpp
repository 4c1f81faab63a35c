#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "certifier.hpp"
#include "errors.hpp"

using namespace cifs;

namespace {

constexpr double kGolden = 0.6180339887498949;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

const LiftMap g1 = LiftMap::rotation(kGolden);
const LiftMap g2 = LiftMap::sine(0.0, -0.5);

double sine_closed(double x) { return x - 0.5 / kTwoPi * std::sin(kTwoPi * x); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

const CertificatePair& certified() {
  static const CertificatePair pair = certify_robust_minimality(g1, g2);
  return pair;
}

// Arcs cover the circle iff, sorted by start, each one reaches the next.
bool cover_oracle(std::vector<Arc> arcs) {
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    const Arc& a = arcs[i];
    const Arc& b = arcs[(i + 1) % arcs.size()];
    const double next = i + 1 < arcs.size() ? b.start : b.start + 1.0;
    if (a.start + a.length < next) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("basin of the sine map") {
  const auto b = locate_basin(g2);
  CHECK(distance(b.p, 0.0) < 1e-12);
  // Dg2 <= 0.95 on (0, eps]  <=>  cos(2 pi x) >= 0.1
  const double eps_oracle = std::acos(0.1) / kTwoPi;
  CHECK(b.eps <= eps_oracle);
  CHECK(b.eps >= eps_oracle - 1.0 / 4096);
  const double e1 = sine_closed(b.eps);
  const double e2 = sine_closed(e1);
  const double e3 = sine_closed(e2);
  CHECK(b.D.start == doctest::Approx(0.0));
  CHECK(b.D.length == doctest::Approx(e1).epsilon(1e-12));
  CHECK(b.B.start == doctest::Approx(e2).epsilon(1e-12));
  CHECK(b.B.length == doctest::Approx(e1 - e2).epsilon(1e-12));
  CHECK(b.delta == doctest::Approx(0.5 * std::min(b.eps - e1, e2 - e3)).epsilon(1e-12));
  CHECK(inclusion_margin(b.B, b.zone) > 0);
  CHECK(inclusion_margin(b.zone, b.A) >= 0);
  CHECK(b.deriv_max <= 0.95);
}

TEST_CASE("basin errors and the other sign") {
  CHECK(kind_of([] { locate_basin(LiftMap::rotation(0.3)); }) == ErrorKind::NoAttractingSide);
  const auto b = locate_basin(LiftMap::sine(0.0, 0.5));
  CHECK(b.p.value() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("cover word search") {
  const auto basin = locate_basin(g2);
  const auto cw = search_cover_words(g1, g2, basin, 10000);
  CHECK(cw.exponents == std::vector<long>{13, 26, 115});
  CHECK(cw.m1 > 0);
  CHECK(cw.m2 > 0);
  std::vector<Arc> imgs;
  for (const auto& h : cw.maps) imgs.push_back(image(h, basin.B));
  CHECK(covers(imgs, basin.B));

  CHECK(kind_of([&] { search_cover_words(LiftMap::rotation(0.5), g2, basin, 100); }) ==
        ErrorKind::PreconditionViolation);
  auto degenerate = basin;
  degenerate.B = Arc::full();
  CHECK(kind_of([&] { search_cover_words(g1, g2, degenerate, 100); }) == ErrorKind::PreconditionViolation);
  CHECK(kind_of([&] { search_cover_words(g1, g2, basin, 2); }) == ErrorKind::SearchExhausted);
}

TEST_CASE("contraction bound") {
  const auto basin = locate_basin(g2);
  const auto cw = search_cover_words(g1, g2, basin, 10000);
  // Dh_i = Dg2 is increasing on the zone, so its max sits at the right end.
  const double oracle = 1.0 - 0.5 * std::cos(kTwoPi * basin.zone.end());
  const double lambda = verify_contraction(cw.maps, basin, 4096);
  CHECK(lambda >= oracle);
  CHECK(lambda - oracle < 1e-3);
  CHECK(lambda < 1.0);

  double last = 1.0;
  for (int n : {256, 512, 1024, 2048, 4096}) {
    const double l = verify_contraction(cw.maps, basin, n);
    CHECK(l <= last + 1e-15);
    last = l;
  }

  std::vector<LiftMap> rots = {cover_map(g1, LiftMap::identity(), 13)};
  CHECK(kind_of([&] { verify_contraction(rots, basin, 1024); }) == ErrorKind::ContractionFails);
}

TEST_CASE("global cover by rotated copies") {
  const Arc B(0.1, 0.2);
  const auto gc = verify_global_cover(g1, B, 10000);
  CHECK(gc.T.size() >= 5);
  CHECK(gc.T.size() <= 8);
  CHECK(gc.m4 > 0);
  std::vector<Arc> fwd, bwd;
  for (long m : gc.T) fwd.push_back(Arc(B.start + m * kGolden, B.length));
  for (long m : gc.S) bwd.push_back(Arc(B.start - m * kGolden, B.length));
  CHECK(cover_oracle(fwd));
  CHECK(cover_oracle(bwd));

  CHECK(verify_global_cover(g1, Arc::full(), 10).T.size() == 1);
  CHECK(kind_of([&] { verify_global_cover(g1, B, 2); }) == ErrorKind::SearchExhausted);
}

TEST_CASE("forward and backward certificates") {
  const auto& pair = certified();
  for (const auto* c : {&pair.forward, &pair.backward}) {
    CHECK(c->margins.all_positive());
    CHECK(c->radius > 0);
    CHECK(c->lambda < 1);
    const auto v = check_certificate(*c);
    CHECK(v.ok);
    CHECK(v.problems.empty());
  }
  CHECK(pair.forward.direction == "forward");
  CHECK(pair.backward.direction == "backward");
  CHECK(pair.forward.cover_exponents == std::vector<long>{13, 26, 115});

  CHECK(kind_of([] { certify_robust_minimality(g1, LiftMap::rotation(0.3)); }) == ErrorKind::NoAttractingSide);
}

TEST_CASE("tampered certificates fail") {
  auto c = certified().forward;
  c.lambda = 1.01;
  CHECK_FALSE(check_certificate(c).ok);
  auto d = certified().forward;
  d.cover_exponents = {13, 26};
  CHECK_FALSE(check_certificate(d).ok);
}

TEST_CASE("perturbations inside the radius keep the margins") {
  const auto& pair = certified();
  const double r = std::min(pair.forward.radius, pair.backward.radius);
  const auto trials = robustness_trials(pair, 0.5 * r, 5, 11);
  REQUIRE(trials.size() == 5);
  for (const auto& t : trials) {
    CHECK(t.ok());
    CHECK(t.forward.margins.all_positive());
    CHECK(t.backward.margins.all_positive());
  }
}

TEST_CASE("perturbed maps stay within the requested C1 size") {
  CounterRng rng(3, 0);
  for (int i = 0; i < 20; ++i) {
    const auto p = perturb_map(g2, 1e-3, rng);
    for (int j = 0; j < 200; ++j) {
      const double x = j / 200.0;
      CHECK(circle_distance(p(x).value(), g2(x).value()) <= 1e-3 + 1e-15);
      CHECK(std::abs(p.deriv(x) - g2.deriv(x)) <= 1e-3 * (1 + 1e-9) + 1e-15);
    }
  }
}

TEST_CASE("compositions of cover maps contract the basin") {
  const auto& c = certified().forward;
  const auto maps = c.cover_maps();
  const Arc& B = c.basin.B;
  CounterRng rng(17, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 15);
    Arc a = B;
    for (int i = 0; i < n; ++i) {
      a = image(maps[rng() % maps.size()], a);
      CHECK(inclusion_margin(a, c.basin.zone) > 0);
    }
    CHECK(a.length <= std::pow(c.lambda, n) * B.length * (1 + 1e-12));
  }
}

TEST_CASE("nested limit") {
  const auto& c = certified().forward;
  const auto maps = c.cover_maps();
  const auto& B = c.basin.B;
  const auto zero = nested_limit(maps, c.basin, c.lambda, B.midpoint(), 0, CirclePoint(B.start));
  CHECK(zero.indices.empty());
  CHECK(zero.approximant.value() == doctest::Approx(B.start));
  CHECK(zero.bound == doctest::Approx(B.length));

  const auto mid = nested_limit(maps, c.basin, c.lambda, B.midpoint(), 20);
  CHECK(mid.indices.size() == 20);
  CHECK(mid.within_bound);
  CHECK(mid.error <= std::pow(c.lambda, 20) * B.length + 20 * kTolInv);
  CHECK(kind_of([&] { nested_limit(maps, c.basin, c.lambda, B.start + 0.5, 3); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("universal words") {
  IFS ifs({g1, g2});
  const auto full = find_universal_word(ifs, Arc::full(), 100, 10);
  CHECK(full.sigma.empty());
  CHECK(full.verified);

  IFS rot({g1});
  const auto r = find_universal_word(rot, Arc(0.3, 0.1), 200, 100);
  CHECK(r.verified);
  // z reaches the arc by time r iff the arcs target - t alpha, t = 0..r, cover z
  auto hit_oracle = [](double len) {
    std::vector<double> s;
    for (int r = 0;; ++r) {
      s.push_back(wrap01(-r * kGolden));
      std::vector<double> t = s;
      std::sort(t.begin(), t.end());
      double gap = t.front() + 1.0 - t.back();
      for (std::size_t i = 1; i < t.size(); ++i) gap = std::max(gap, t[i] - t[i - 1]);
      if (gap < len) return r;
    }
  };
  CHECK(static_cast<int>(r.sigma.size()) >= hit_oracle(0.1) - 1);
  CHECK(static_cast<int>(r.sigma.size()) <= hit_oracle(0.09));
  for (int a : r.sigma.letters()) CHECK(a == 1);

  const Arc target(0.3, 0.05);
  const auto u = find_universal_word(ifs, target, 1000, 500);
  CHECK(u.verified);
  CHECK(u.sigma.size() <= 500);
  CHECK(u.fine_grid == 10000);
  for (int j = 0; j < 10000; j += 7) CHECK(capture_time(ifs, u.sigma, target, j / 10000.0).has_value());

  CHECK(kind_of([&] { find_universal_word(ifs, target, 1000, 3); }) == ErrorKind::LengthExceeded);
}
