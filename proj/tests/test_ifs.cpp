#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "errors.hpp"
#include "ifs.hpp"
#include "rng.hpp"

using namespace cifs;

namespace {

constexpr double kGolden = 0.6180339887498949;

IFS golden_sine() { return IFS({LiftMap::rotation(kGolden), LiftMap::sine(0.0, -0.5)}, "instance"); }

Word random_word(int k, std::size_t len, CounterRng& rng) {
  Word w({}, k);
  for (std::size_t i = 0; i < len; ++i) w.push_back(1 + static_cast<int>(rng() % k));
  return w;
}

double max_circular_gap(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double gap = xs.front() + 1.0 - xs.back();
  for (std::size_t i = 1; i < xs.size(); ++i) gap = std::max(gap, xs[i] - xs[i - 1]);
  return gap;
}

}  // namespace

TEST_CASE("branch order examples") {
  IFS rot({LiftMap::rotation(0.25), LiftMap::rotation(0.5)});
  CHECK(branch_apply(rot, Word({1, 2}, 2), 0.0).value() == doctest::Approx(0.75));
  CHECK(branch_apply(rot, Word({}, 2), 0.3).value() == 0.3);

  const auto r = LiftMap::rotation(0.25);
  const auto g = LiftMap::sine(0.0, -0.5);
  IFS mixed({r, g});
  const double x = 0.1;
  CHECK(branch_apply(mixed, Word({2, 1}, 2), x) == r(g(x)));
  CHECK(branch_apply(mixed, Word({1, 2}, 2), x) == g(r(x)));
  CHECK(distance(branch_apply(mixed, Word({2, 1}, 2), x), branch_apply(mixed, Word({1, 2}, 2), x)) > 1e-3);
}

TEST_CASE("hat composition reverses the order") {
  const auto ifs = golden_sine();
  CounterRng rng(2, 0);
  for (int i = 0; i < 50; ++i) {
    const Word w = random_word(2, 1 + rng() % 20, rng);
    const double x = rng.uniform();
    CHECK(ifs.hat_apply(w, x) == ifs.apply(w.reversed(), x));
  }
}

TEST_CASE("trajectory and derivative along a branch") {
  const auto ifs = golden_sine();
  const Word w({2, 1, 2, 2, 1}, 2);
  const auto t = ifs.trajectory(w, 0.3);
  REQUIRE(t.size() == w.size());
  CHECK(t.back() == ifs.apply(w, 0.3));
  CHECK(t[0] == ifs.generator(2)(0.3));
  auto [y, d] = ifs.apply_deriv(w, 0.3);
  CHECK(y == ifs.apply(w, 0.3));
  double manual = 1.0;
  CirclePoint z = 0.3;
  for (int a : w.letters()) {
    manual *= ifs.generator(a).deriv(z);
    z = ifs.generator(a)(z);
  }
  CHECK(d == doctest::Approx(manual).epsilon(1e-12));
  CHECK(ifs.as_map(w)(0.3).value() == doctest::Approx(y.value()).epsilon(1e-12));
}

TEST_CASE("inverse IFS duality") {
  const auto ifs = golden_sine();
  const auto inv = ifs.inverse_ifs();
  CounterRng rng(9, 0);
  for (int i = 0; i < 50; ++i) {
    const Word w = random_word(2, 1 + rng() % 30, rng);
    const double x = rng.uniform();
    const auto y = ifs.apply(w, x);
    CHECK(distance(inv.apply(w.reversed(), y), x) < 1e-10);
    CHECK(distance(ifs.inverse_apply(w, y), x) < 1e-10);
  }
}

TEST_CASE("arc images") {
  const auto ifs = golden_sine();
  const Word w({2, 2, 1}, 2);
  const Arc a(0.9, 0.3);
  const Arc img = ifs.apply_arc(w, a);
  CHECK(img.start == doctest::Approx(ifs.apply(w, a.start).value()));
  CHECK(wrap01(img.end()) == doctest::Approx(ifs.apply(w, a.end_point()).value()));
  CHECK(img.length > 0);
  CHECK(img.length < 1);
  CHECK(ifs.apply_arc(w, Arc::full()).is_full());
}

TEST_CASE("invalid letters are rejected") {
  const auto ifs = golden_sine();
  CHECK_THROWS_AS(ifs.check_word(Word({1, 3}, 3)), Error);
  CHECK_THROWS_AS(IFS({}), Error);
}

TEST_CASE("hat images of the circle stay full") {
  const auto ifs = golden_sine();
  CounterRng rng(4, 0);
  const Word w = random_word(2, 1000, rng);
  const auto t0 = std::chrono::steady_clock::now();
  const auto rows = hat_diameter_decay(ifs, w, 1000);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(rows.size() == w.size() + 1);
  for (const auto& r : rows) {
    CHECK(r.image_length == doctest::Approx(1.0));
    CHECK(r.diameter == doctest::Approx(0.5));
  }
  CHECK(secs < 1.0);
  const auto empty = hat_diameter_decay(ifs, Word({}, 2), 16);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].image_length == doctest::Approx(1.0));
  CHECK_THROWS_AS(hat_diameter_decay(ifs, w, 2), Error);
}

TEST_CASE("golden rotation orbit matches the three-gap oracle") {
  IFS rot({LiftMap::rotation(kGolden)});
  const auto orbit = semigroup_orbit(rot, 0.0, 1000);
  CHECK(orbit.size() == 1000);
  std::vector<double> xs, oracle;
  for (auto p : orbit) xs.push_back(p.value());
  for (int k = 1; k <= 1000; ++k) oracle.push_back(wrap01(k * kGolden));
  const double gap = max_circular_gap(xs);
  CHECK(gap <= 0.004);
  CHECK(gap == doctest::Approx(max_circular_gap(oracle)).epsilon(1e-9));
}

TEST_CASE("orbit size limits") {
  IFS id({LiftMap::identity()});
  const auto o = semigroup_orbit(id, 0.3, 50);
  REQUIRE(o.size() == 1);
  CHECK(o[0].value() == doctest::Approx(0.3));
  CHECK(semigroup_orbit(golden_sine(), 0.2, 2).size() <= 6);
  CHECK(semigroup_orbit(golden_sine(), 0.2, 30, 100).size() == 100);
}

TEST_CASE("orbits grow monotonically with depth") {
  const auto ifs = golden_sine();
  std::vector<CirclePoint> prev;
  for (int depth = 1; depth <= 8; ++depth) {
    const auto cur = semigroup_orbit(ifs, 0.2, depth);
    CHECK(cur.size() >= prev.size());
    for (auto p : prev) {
      bool found = false;
      for (auto q : cur) found = found || distance(p, q) <= kDedupRes;
      CHECK(found);
    }
    prev = cur;
  }
}

TEST_CASE("minimality estimates") {
  IFS rot({LiftMap::rotation(kGolden)});
  auto r = minimality_estimate(rot, 0.01, 4, 10000);
  CHECK(r.minimal);
  CHECK(r.worst_gap <= 0.01);

  IFS single({LiftMap::sine(0.0, -0.5)});
  auto s = minimality_estimate(single, 0.01, 16, 200);
  CHECK_FALSE(s.minimal);
  CHECK(s.witness.has_value());

  const auto ifs = golden_sine();
  auto f = minimality_estimate(ifs, 0.05, 8, 300);
  auto b = minimality_estimate(ifs.inverse_ifs(), 0.05, 8, 300);
  CHECK(f.minimal);
  CHECK(b.minimal);
}

TEST_CASE("worst gap does not increase with depth") {
  const auto ifs = golden_sine();
  double last = 2.0;
  for (int depth : {20, 60, 180}) {
    const auto r = minimality_estimate(ifs, 0.02, 4, depth);
    CHECK(r.worst_gap <= last + 1e-12);
    last = r.worst_gap;
  }
}

TEST_CASE("random orbit density") {
  const auto ifs = golden_sine();
  const auto m = SequenceModel::uniform(2);
  const auto d = random_orbit_density(ifs, m, 0.1, 0.05, 10000, 200, 3);
  CHECK(d.fraction >= 0.99);
  CHECK(d.n_samples == 200);

  IFS single({LiftMap::sine(0.0, -0.5)});
  const auto z = random_orbit_density(single, SequenceModel::uniform(1), 0.1, 0.05, 10000, 50, 3);
  CHECK(z.fraction == 0.0);

  const auto all = random_orbit_density(ifs, m, 0.1, 1.0, 10, 20, 3);
  CHECK(all.fraction == 1.0);

  const auto again = random_orbit_density(ifs, m, 0.1, 0.05, 2000, 50, 3);
  CHECK(again.fraction == random_orbit_density(ifs, m, 0.1, 0.05, 2000, 50, 3).fraction);
}

TEST_CASE("coverage grid") {
  CoverageGrid g(0.1);
  CHECK_FALSE(g.complete());
  for (int i = 0; i < 10; ++i) g.mark(i / 10.0 + 0.05);
  CHECK(g.complete());
  CHECK(g.covering_radius({0.0, 0.5}) == doctest::Approx(0.25).epsilon(0.05));
}
