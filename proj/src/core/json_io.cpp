// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "json_io.hpp"

#include <charconv>
#include <cmath>

#include "errors.hpp"

namespace cifs {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) bad(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) bad(path + "." + key, "missing field");
  return *it;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  double x = v.get<double>();
  if (!std::isfinite(x)) bad(path, "expected a finite number");
  return x;
}

long as_integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) bad(path, "expected an integer");
  return v.get<long>();
}

std::vector<double> as_numbers(const Json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Library errors raised while building a value are re-labelled with the path.
template <class F>
auto at_path(const std::string& path, F&& build) {
  try {
    return build();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    bad(path, e.what());
  }
}

Json double_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

}  // namespace

namespace field {

const Json* find(const Json& obj, const std::string& key) {
  if (!obj.is_object()) return nullptr;
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const Json& obj, const std::string& key, const std::string& path) {
  return as_number(require(obj, key, path), path + "." + key);
}

double number_or(const Json& obj, const std::string& key, double fallback, const std::string& path) {
  const Json* v = find(obj, key);
  return v ? as_number(*v, path + "." + key) : fallback;
}

long integer(const Json& obj, const std::string& key, const std::string& path) {
  return as_integer(require(obj, key, path), path + "." + key);
}

long integer_or(const Json& obj, const std::string& key, long fallback, const std::string& path) {
  const Json* v = find(obj, key);
  return v ? as_integer(*v, path + "." + key) : fallback;
}

bool boolean_or(const Json& obj, const std::string& key, bool fallback, const std::string& path) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_boolean()) bad(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string string_or(const Json& obj, const std::string& key, const std::string& fallback, const std::string& path) {
  const Json* v = find(obj, key);
  if (!v) return fallback;
  if (!v->is_string()) bad(path + "." + key, "expected a string");
  return v->get<std::string>();
}

}  // namespace field

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    bad(what, std::string("invalid JSON: ") + e.what());
  }
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string canonical(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const LiftMap& f) {
  switch (f.kind()) {
    case LiftMap::Kind::Rotation: return {{"kind", "rotation"}, {"alpha", f.alpha()}};
    case LiftMap::Kind::Sine:
      return {{"kind", "sine"}, {"a", f.sine_a()}, {"b", f.sine_b()}, {"freq", f.sine_freq()}, {"phase", f.sine_phase()}};
    case LiftMap::Kind::Composition: {
      Json maps = Json::array();
      for (const auto& p : f.parts()) maps.push_back(to_json(p));
      return {{"kind", "composition"}, {"maps", maps}};
    }
    case LiftMap::Kind::Power: return {{"kind", "power"}, {"base", to_json(f.base())}, {"exponent", f.exponent()}};
    case LiftMap::Kind::Inverse: return {{"kind", "inverse"}, {"base", to_json(f.base())}};
  }
  return nullptr;
}

LiftMap map_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected a map object");
  const Json& kind_v = require(j, "kind", path);
  if (!kind_v.is_string()) bad(path + ".kind", "expected a string");
  const std::string kind = kind_v.get<std::string>();
  if (kind == "rotation") return LiftMap::rotation(field::number(j, "alpha", path));
  if (kind == "sine") {
    double a = field::number(j, "a", path);
    double b = field::number(j, "b", path);
    long freq = field::integer_or(j, "freq", 1, path);
    double phase = field::number_or(j, "phase", 0.0, path);
    if (!(std::abs(b) < 1.0)) bad(path + ".b", "must satisfy |b| < 1 for a homeomorphism");
    if (freq < 1) bad(path + ".freq", "must be >= 1");
    return LiftMap::sine(a, b, static_cast<int>(freq), phase);
  }
  if (kind == "composition") {
    const Json& maps = require(j, "maps", path);
    if (!maps.is_array() || maps.empty()) bad(path + ".maps", "expected a non-empty array");
    std::vector<LiftMap> parts;
    for (std::size_t i = 0; i < maps.size(); ++i)
      parts.push_back(map_from_json(maps[i], path + ".maps[" + std::to_string(i) + "]"));
    return LiftMap::composition(std::move(parts));
  }
  if (kind == "power")
    return LiftMap::power(map_from_json(require(j, "base", path), path + ".base"), field::integer(j, "exponent", path));
  if (kind == "inverse") return LiftMap::inverse(map_from_json(require(j, "base", path), path + ".base"));
  bad(path + ".kind", "unknown map kind '" + kind + "'");
}

Json to_json(const SequenceModel& m) {
  if (m.kind() == SequenceModel::Kind::Bernoulli)
    return {{"kind", "bernoulli"}, {"weights", m.weights()}, {"p", m.floor_p()}};
  return {{"kind", "markov"}, {"rows", m.rows()}, {"initial", m.weights()}, {"p", m.floor_p()}};
}

SequenceModel model_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected a model object");
  const std::string kind = field::string_or(j, "kind", "", path);
  std::optional<double> p;
  if (field::find(j, "p")) p = field::number(j, "p", path);
  if (kind == "bernoulli") {
    auto w = as_numbers(require(j, "weights", path), path + ".weights");
    return at_path(path, [&] { return SequenceModel::bernoulli(w, p); });
  }
  if (kind == "markov") {
    const Json& rows_v = require(j, "rows", path);
    if (!rows_v.is_array()) bad(path + ".rows", "expected an array of rows");
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < rows_v.size(); ++i)
      rows.push_back(as_numbers(rows_v[i], path + ".rows[" + std::to_string(i) + "]"));
    std::vector<double> initial;
    if (const Json* init = field::find(j, "initial")) initial = as_numbers(*init, path + ".initial");
    return at_path(path, [&] { return SequenceModel::markov(rows, initial, p); });
  }
  bad(path + ".kind", "expected \"bernoulli\" or \"markov\"");
}

Json to_json(const Word& w) { return Json(w.letters()); }

Word word_from_json(const Json& j, int k, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of letters");
  std::vector<int> letters;
  for (std::size_t i = 0; i < j.size(); ++i) {
    long l = as_integer(j[i], path + "[" + std::to_string(i) + "]");
    if (l < 1 || l > k) bad(path + "[" + std::to_string(i) + "]", "letter outside 1.." + std::to_string(k));
    letters.push_back(static_cast<int>(l));
  }
  return Word(std::move(letters), k);
}

Json to_json(const Arc& a) { return {{"start", a.start}, {"length", a.length}}; }

Arc arc_from_json(const Json& j, const std::string& path) {
  double s = field::number(j, "start", path);
  double len = field::number(j, "length", path);
  if (len < 0.0 || len > 1.0) bad(path + ".length", "must lie in [0, 1]");
  return Arc(s, len);
}

Json to_json(const BasinData& b) {
  return {{"p", b.p.value()}, {"eps", b.eps},       {"delta", b.delta},  {"A", to_json(b.A)},
          {"B", to_json(b.B)}, {"D", to_json(b.D)}, {"zone", to_json(b.zone)}, {"deriv_max", b.deriv_max}};
}

Json to_json(const Certificate& c) {
  return {{"schema", 1},
          {"direction", c.direction},
          {"flipped", c.flipped},
          {"generators", {to_json(c.g1), to_json(c.g2)}},
          {"g2_power", c.g2_power},
          {"basin", to_json(c.basin)},
          {"cover_exponents", c.cover_exponents},
          {"lambda", c.lambda},
          {"global_cover", {{"T", c.global_cover.T}, {"S", c.global_cover.S}}},
          {"margins",
           {{"m1", c.margins.m1}, {"m2", c.margins.m2}, {"m3", c.margins.m3}, {"m4", c.margins.m4},
            {"basin", c.margins.basin}}},
          {"amplification", {{"c0", c.amplification.c0}, {"c1", c.amplification.c1}}},
          {"radius", c.radius},
          {"grid_n", c.grid_n}};
}

Certificate certificate_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected a certificate object");
  if (field::integer(j, "schema", path) != 1) bad(path + ".schema", "unsupported schema version");
  Certificate c;
  c.direction = field::string_or(j, "direction", "", path);
  if (c.direction != "forward" && c.direction != "backward") bad(path + ".direction", "expected forward or backward");
  c.flipped = field::boolean_or(j, "flipped", false, path);
  const Json& gens = require(j, "generators", path);
  if (!gens.is_array() || gens.size() != 2) bad(path + ".generators", "expected two maps");
  c.g1 = map_from_json(gens[0], path + ".generators[0]");
  c.g2 = map_from_json(gens[1], path + ".generators[1]");
  c.g2_power = static_cast<int>(field::integer(j, "g2_power", path));
  if (c.g2_power < 1) bad(path + ".g2_power", "must be >= 1");
  const Json& b = require(j, "basin", path);
  const std::string bp = path + ".basin";
  c.basin.p = CirclePoint(field::number(b, "p", bp));
  c.basin.eps = field::number(b, "eps", bp);
  c.basin.delta = field::number(b, "delta", bp);
  c.basin.A = arc_from_json(require(b, "A", bp), bp + ".A");
  c.basin.B = arc_from_json(require(b, "B", bp), bp + ".B");
  c.basin.D = arc_from_json(require(b, "D", bp), bp + ".D");
  c.basin.zone = arc_from_json(require(b, "zone", bp), bp + ".zone");
  c.basin.deriv_max = field::number_or(b, "deriv_max", 0.0, bp);
  auto exps = [&](const Json& v, const std::string& p) {
    if (!v.is_array()) bad(p, "expected an array of integers");
    std::vector<long> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_integer(v[i], p + "[" + std::to_string(i) + "]"));
    return out;
  };
  c.cover_exponents = exps(require(j, "cover_exponents", path), path + ".cover_exponents");
  c.lambda = field::number(j, "lambda", path);
  const Json& gc = require(j, "global_cover", path);
  c.global_cover.T = exps(require(gc, "T", path + ".global_cover"), path + ".global_cover.T");
  c.global_cover.S = exps(require(gc, "S", path + ".global_cover"), path + ".global_cover.S");
  const Json& m = require(j, "margins", path);
  const std::string mp = path + ".margins";
  c.margins = {field::number(m, "m1", mp), field::number(m, "m2", mp), field::number(m, "m3", mp),
               field::number(m, "m4", mp), field::number(m, "basin", mp)};
  c.global_cover.m4 = c.margins.m4;
  const Json& a = require(j, "amplification", path);
  c.amplification = {field::number(a, "c0", path + ".amplification"), field::number(a, "c1", path + ".amplification")};
  c.radius = field::number(j, "radius", path);
  c.grid_n = static_cast<int>(field::integer(j, "grid_n", path));
  if (c.grid_n < 1) bad(path + ".grid_n", "must be >= 1");
  return c;
}

Json to_json(const Verification& v) {
  return {{"ok", v.ok},
          {"lambda", v.lambda},
          {"margins",
           {{"m1", v.margins.m1}, {"m2", v.margins.m2}, {"m3", v.margins.m3}, {"m4", v.margins.m4},
            {"basin", v.margins.basin}}},
          {"radius", v.radius},
          {"problems", v.problems}};
}

Json to_json(const MinimalityReport& r) {
  Json j = {{"minimal", r.minimal}, {"worst_gap", r.worst_gap}, {"start_grid", r.start_grid},
            {"depth", r.depth},     {"eps", r.eps},             {"witness", nullptr}};
  if (r.witness) j["witness"] = r.witness->value();
  return j;
}

Json to_json(const DensityResult& r) {
  return {{"fraction", r.fraction}, {"stderr", r.std_error}, {"n_samples", r.n_samples}, {"seed", r.seed}};
}

Json to_json(const SyncReport& r) {
  return {{"ifs", r.label},
          {"model", r.model_kind},
          {"n_pairs", r.n_pairs},
          {"horizon", r.horizon},
          {"tol_sync", r.tol_sync},
          {"sync_fraction", r.sync_fraction},
          {"median_final_distance", r.median_final_distance},
          {"baseline_fraction", r.baseline_fraction},
          {"stderr", r.std_error},
          {"seed", r.seed}};
}

Json to_json(const RepellerEstimate& r) {
  Json pts = Json::array(), brackets = Json::array();
  for (auto p : r.points) pts.push_back(p.value());
  for (const auto& b : r.brackets) brackets.push_back(to_json(b));
  return {{"levels", r.levels},     {"points", pts},         {"brackets", brackets},
          {"ell_hat", r.ell_hat},   {"residual", r.residual}, {"prefix_length", r.omega_prefix.size()}};
}

Json to_json(const AntonovEvidence& e) {
  return {{"verdict", to_string(e.verdict)}, {"ell", e.ell},           {"sync", to_json(e.sync)},
          {"z_score", double_or_null(e.z_score)}, {"ell_hats", e.ell_hats}, {"mode_fraction", e.mode_fraction},
          {"notes", e.notes}};
}

Json to_json(const PeriodicPointRecord& r) {
  return {{"word", to_json(r.word)},
          {"point", r.point.value()},
          {"residual", r.residual},
          {"multiplier", double_or_null(r.multiplier)},
          {"log_multiplier", r.log_multiplier},
          {"stability", to_string(r.stability)}};
}

Json to_json(const UniversalWord& u) {
  return {{"sigma", to_json(u.sigma)},
          {"length", u.sigma.size()},
          {"verified", u.verified},
          {"fine_grid", u.fine_grid},
          {"capture_times", u.capture_times}};
}

}  // namespace cifs
