#include <cmath>
#include <vector>

#include "doctest.h"

#include "errors.hpp"
#include "periodic_points.hpp"

using namespace cifs;

namespace {

constexpr double kGolden = 0.6180339887498949;

IFS golden_sine() { return IFS({LiftMap::rotation(kGolden), LiftMap::sine(0.0, -0.5)}); }

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

// Secant slope of the branch map over [q - h, q + h] on the lift.
double secant(const IFS& ifs, const Word& w, double q, double h) {
  const auto f = ifs.as_map(w);
  return (f.lift(q + h) - f.lift(q - h)) / (2 * h);
}

}  // namespace

TEST_CASE("records") {
  const auto ifs = golden_sine();
  const auto r = make_record(ifs, Word({2}, 2), 0.0);
  CHECK(r.residual == doctest::Approx(0.0));
  CHECK(r.multiplier == doctest::Approx(0.5));
  CHECK(r.log_multiplier == doctest::Approx(std::log(0.5)));
  CHECK(r.stability == FixedPointStability::Attracting);
  const auto s = make_record(ifs, Word({2, 2}, 2), 0.5);
  CHECK(s.multiplier == doctest::Approx(2.25));
  CHECK(s.stability == FixedPointStability::Repelling);
}

TEST_CASE("contracted arc of the deterministic branch") {
  const auto ifs = golden_sine();
  const auto c = find_contracted_fixed_arc(ifs, Word(std::vector<int>(200, 2), 2));
  const auto n = c.word.size();
  CHECK(n >= 1);
  CHECK(distance(c.record.point, 0.0) < 1e-9);
  CHECK(c.record.multiplier == doctest::Approx(std::pow(0.5, static_cast<double>(n))));
  CHECK(c.U.contains(0.0));
  CHECK_FALSE(c.U.contains(0.5));
  const Arc img = ifs.apply_arc(c.word, c.U);
  CHECK(inclusion_margin(img, c.U) > 0);
  CHECK(img.length < c.U.length);

  IFS rot({LiftMap::rotation(kGolden), LiftMap::rotation(0.3)});
  CHECK(kind_of([&] { find_contracted_fixed_arc(rot, SequenceModel::uniform(2), 1, 2000); }) ==
        ErrorKind::HorizonExceeded);
}

TEST_CASE("contracted arcs along random branches") {
  const auto ifs = golden_sine();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = find_contracted_fixed_arc(ifs, SequenceModel::uniform(2), seed);
    CHECK(c.record.residual < 1e-10);
    CHECK(c.record.stability == FixedPointStability::Attracting);
    CHECK(c.U.contains(c.record.point.value()));
  }
}

TEST_CASE("attracting periodic point in a prescribed arc") {
  const auto ifs = golden_sine();
  const auto attr = find_contracted_fixed_arc(ifs, SequenceModel::uniform(2), 1);
  const Arc J(0.37, 0.05);
  const auto r = periodic_in_interval(ifs, J, attr);
  CHECK(J.contains(r.point.value()));
  CHECK(r.residual < 1e-9);
  CHECK(r.stability == FixedPointStability::Attracting);
  CHECK(r.multiplier < 1);
  CHECK(distance(ifs.apply(r.word, r.point), r.point) == doctest::Approx(r.residual).epsilon(1e-6));
  // multiplier below 1 means nearby points are pulled in
  CHECK(secant(ifs, r.word, r.point.value(), 1e-7) < 1.0);
  auto [y, d] = ifs.apply_deriv(r.word, r.point);
  CHECK(std::log(d) == doctest::Approx(r.log_multiplier).epsilon(1e-9));
}

TEST_CASE("arc containing the attractor") {
  const auto ifs = golden_sine();
  const auto attr = find_contracted_fixed_arc(ifs, SequenceModel::uniform(2), 1);
  const Arc J(attr.record.point.value() - 0.01, 0.02);
  const auto r = periodic_in_interval(ifs, J, attr);
  CHECK(J.contains(r.point.value()));
  CHECK(r.residual < 1e-9);
}

TEST_CASE("repelling periodic point in a prescribed arc") {
  const auto ifs = golden_sine();
  const auto inv = ifs.inverse_ifs();
  const auto attr = find_contracted_fixed_arc(inv, SequenceModel::uniform(2), 1);
  const Arc J(0.37, 0.05);
  const auto r = repelling_in_interval(ifs, J, attr);
  CHECK(J.contains(r.point.value()));
  CHECK(r.residual < 1e-9);
  CHECK(r.stability == FixedPointStability::Repelling);
  CHECK(r.multiplier > 1);
  // the inverse composition fixes the point with the reciprocal multiplier
  const Word back = r.word.reversed();
  auto [y, d] = inv.apply_deriv(back, r.point);
  CHECK(distance(y, r.point) < 1e-9);
  CHECK(std::log(d) == doctest::Approx(-r.log_multiplier).epsilon(1e-6));
}

TEST_CASE("single map has no periodic points in far arcs") {
  IFS single({LiftMap::sine(0.0, -0.5)});
  const auto attr = find_contracted_fixed_arc(single, SequenceModel::uniform(1), 1);
  CHECK(kind_of([&] { periodic_in_interval(single, Arc(0.6, 0.05), attr); }) == ErrorKind::SearchExhausted);
}

TEST_CASE("density sweep") {
  const auto ifs = golden_sine();
  const auto rep = density_sweep(ifs, 4);
  CHECK(rep.attracting == 4);
  CHECK(rep.repelling == 4);
  CHECK(rep.rows.size() == 8);
  for (const auto& row : rep.rows) {
    REQUIRE(row.record.has_value());
    CHECK(row.record->residual < 1e-9);
    CHECK((row.record->multiplier < 1) == (row.cls == "attracting"));
  }

  IFS rot({LiftMap::rotation(kGolden), LiftMap::rotation(0.3)});
  SweepParams p;
  p.horizon = 500;
  const auto none = density_sweep(rot, 5, p);
  CHECK(none.attracting == 0);
  CHECK(none.repelling == 0);

  const auto one = density_sweep(ifs, 1);
  CHECK(one.attracting == 1);
  CHECK(one.repelling == 1);
}
