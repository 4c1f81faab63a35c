// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "experiments.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "errors.hpp"

namespace cifs {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::Config, path + ": " + what);
}

// Typed access to the "params" object with path-labelled errors.
class Params {
 public:
  explicit Params(const Json& j) : j_(j) {
    if (!j_.is_object()) bad("params", "expected an object");
  }
  double num(const char* key, double fallback) const { return field::number_or(j_, key, fallback, "params"); }
  long integer(const char* key, long fallback) const { return field::integer_or(j_, key, fallback, "params"); }
  int positive(const char* key, long fallback) const {
    long v = integer(key, fallback);
    if (v < 1) bad(std::string("params.") + key, "must be >= 1");
    return static_cast<int>(v);
  }
  int nonnegative(const char* key, long fallback) const {
    long v = integer(key, fallback);
    if (v < 0) bad(std::string("params.") + key, "must be >= 0");
    return static_cast<int>(v);
  }
  bool flag(const char* key, bool fallback) const { return field::boolean_or(j_, key, fallback, "params"); }
  std::string str(const char* key, const std::string& fallback) const {
    return field::string_or(j_, key, fallback, "params");
  }
  Arc arc(const char* key, Arc fallback) const {
    const Json* v = field::find(j_, key);
    return v ? arc_from_json(*v, std::string("params.") + key) : fallback;
  }
  const Json* find(const char* key) const { return field::find(j_, key); }

 private:
  const Json& j_;
};

std::uint64_t seed_from(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0))
    bad(path, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string csv_number(double x) { return std::isfinite(x) ? format_double(x) : std::string(); }

IFS two_generator_check(const ExperimentConfig& cfg) {
  if (cfg.generators.size() != 2) bad("generators", "this command needs exactly two generators (g1, g2)");
  return cfg.ifs();
}

CertifyParams certify_params(const Params& p) {
  CertifyParams c;
  c.n_max = p.positive("n_max", c.n_max);
  c.global_n_max = p.positive("global_n_max", c.global_n_max);
  c.grid_n = p.positive("grid_n", c.grid_n);
  c.basin_grid_n = p.positive("basin_grid_n", c.basin_grid_n);
  c.m_deriv = p.num("m_deriv", c.m_deriv);
  c.c_safety = p.num("c_safety", c.c_safety);
  c.radius_cap = p.num("radius_cap", c.radius_cap);
  c.max_g2_power = p.positive("max_g2_power", c.max_g2_power);
  return c;
}

PeriodicSearchParams search_params(const Params& p) {
  PeriodicSearchParams s;
  s.depth_f = p.nonnegative("depth_f", s.depth_f);
  s.depth_g = p.nonnegative("depth_g", s.depth_g);
  s.node_cap = static_cast<std::size_t>(p.positive("node_cap", static_cast<long>(s.node_cap)));
  s.m_max = p.positive("m_max", s.m_max);
  return s;
}

Json pair_to_json(const CertificatePair& pair) {
  return {{"forward", to_json(pair.forward)}, {"backward", to_json(pair.backward)}};
}

std::vector<Certificate> certificates_from_text(const std::string& text) {
  Json j = parse_json(text, "certificate");
  std::vector<Certificate> out;
  if (j.is_object() && j.contains("forward")) {
    out.push_back(certificate_from_json(j["forward"], "certificate.forward"));
    if (!j.contains("backward")) bad("certificate.backward", "missing field");
    out.push_back(certificate_from_json(j["backward"], "certificate.backward"));
  } else {
    out.push_back(certificate_from_json(j, "certificate"));
  }
  return out;
}

using Handler = std::function<CommandResult(const ExperimentConfig&, const Json&)>;

CommandResult simulate_orbit(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  IFS ifs = cfg.ifs();
  Word w;
  if (const Json* wj = p.find("word")) w = word_from_json(*wj, ifs.size(), "params.word");
  else w = sample_sequence(cfg.model_or_uniform(), static_cast<std::size_t>(p.nonnegative("length", 100)), cfg.seed);
  CirclePoint x(p.num("x", 0.0));
  std::ostringstream out;
  out << "n,letter,point\n";
  auto traj = ifs.trajectory(w, x);
  for (std::size_t i = 0; i < traj.size(); ++i) out << i + 1 << ',' << w[i] << ',' << format_double(traj[i].value()) << '\n';
  return {kExitOk, out.str(), {}};
}

CommandResult estimate_minimality(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  IFS ifs = cfg.ifs();
  double eps = p.num("eps", 0.01);
  int grid = p.positive("start_grid", 16);
  int depth = p.positive("depth", 10000);
  auto cap = static_cast<std::size_t>(p.positive("cap", static_cast<long>(kDefaultOrbitCap)));
  auto fwd = minimality_estimate(ifs, eps, grid, depth, cap);
  auto bwd = minimality_estimate(ifs.inverse_ifs(), eps, grid, depth, cap);
  Json j = {{"forward", to_json(fwd)}, {"backward", to_json(bwd)}};
  return {kExitOk, canonical(j), {}};
}

CommandResult classify(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  ClassifyParams c;
  c.sync_horizon = p.nonnegative("sync_horizon", c.sync_horizon);
  c.n_pairs = p.positive("n_pairs", c.n_pairs);
  c.tol_sync = p.num("tol_sync", c.tol_sync);
  c.repeller_horizon = p.positive("repeller_horizon", c.repeller_horizon);
  c.n_seeds = p.positive("n_seeds", c.n_seeds);
  c.m_levels = p.positive("m_levels", c.m_levels);
  c.majority = p.num("majority", c.majority);
  c.check_minimality = p.flag("check_minimality", c.check_minimality);
  c.minimality_eps = p.num("minimality_eps", c.minimality_eps);
  c.minimality_depth = p.positive("minimality_depth", c.minimality_depth);
  c.seed = cfg.seed;
  auto ev = antonov_classify(cfg.ifs(), cfg.model_or_uniform(), c);
  return {kExitOk, canonical(to_json(ev)), {}};
}

CommandResult detect(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  IFS ifs = cfg.ifs();
  Word w;
  if (const Json* wj = p.find("word")) w = word_from_json(*wj, ifs.size(), "params.word");
  else w = sample_sequence(cfg.model_or_uniform(), static_cast<std::size_t>(p.positive("horizon", 5000)), cfg.seed);
  auto est = detect_repellers(ifs, w, p.positive("m_levels", kDefaultRepellerLevels));
  return {kExitOk, canonical(to_json(est)), {}};
}

CommandResult tail_bound_cmd(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  std::vector<int> grid;
  if (const Json* g = p.find("n_grid")) {
    if (!g->is_array()) bad("params.n_grid", "expected an array of integers");
    for (std::size_t i = 0; i < g->size(); ++i) {
      const Json& v = (*g)[i];
      if (!v.is_number_integer() || v.get<long>() < 1) bad("params.n_grid[" + std::to_string(i) + "]", "expected an integer >= 1");
      grid.push_back(v.get<int>());
    }
  }
  auto tc = hitting_tail_check(cfg.ifs(), cfg.model_or_uniform(), p.arc("target", Arc(0.3, 0.05)),
                               CirclePoint(p.num("x", 0.0)), grid, p.positive("n_trials", 10000), cfg.seed,
                               p.positive("letter", 1));
  std::ostringstream out;
  out << "n,empirical,bound,stderr\n";
  for (const auto& r : tc.rows)
    out << r.n << ',' << format_double(r.empirical) << ',' << format_double(r.bound) << ',' << format_double(r.std_error)
        << '\n';
  CommandResult res{tc.all_ok ? kExitOk : kExitVerification, out.str(), {}};
  if (!tc.all_ok) res.error = "VerificationFailed: empirical miss probability exceeds the bound";
  return res;
}

CommandResult check(const Json& options) {
  const Json* text = field::find(options, "certificate");
  if (!text || !text->is_string()) bad("options.certificate", "certificate text required for --check");
  auto certs = certificates_from_text(text->get<std::string>());
  Json j = Json::object();
  bool ok = true;
  for (const auto& c : certs) {
    Verification v = check_certificate(c);
    ok = ok && v.ok;
    j[c.direction] = to_json(v);
  }
  j["ok"] = ok;
  CommandResult res{ok ? kExitOk : kExitVerification, canonical(j), {}};
  if (!ok) res.error = "VerificationFailed: certificate check failed";
  return res;
}

CommandResult certify(const ExperimentConfig& cfg, const Json& options) {
  if (field::boolean_or(options, "check", false, "options")) return check(options);
  Params p(cfg.params);
  IFS ifs = two_generator_check(cfg);
  CertificatePair pair = certify_robust_minimality(ifs.generator(1), ifs.generator(2), certify_params(p));
  Json j = pair_to_json(pair);
  int trials = p.nonnegative("robustness_trials", 0);
  int code = kExitOk;
  if (trials > 0) {
    double r = std::min(pair.forward.radius, pair.backward.radius);
    auto res = robustness_trials(pair, 0.5 * r, trials, cfg.seed);
    int passed = static_cast<int>(std::count_if(res.begin(), res.end(), [](const RobustnessTrial& t) { return t.ok(); }));
    j["robustness"] = {{"size", 0.5 * r}, {"trials", trials}, {"passed", passed}};
    if (passed != trials) code = kExitVerification;
  }
  CommandResult res{code, canonical(j), {}};
  if (code) res.error = "VerificationFailed: a robustness trial failed";
  return res;
}

CommandResult universal_word(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  auto u = find_universal_word(cfg.ifs(), p.arc("target", Arc(0.3, 0.05)), p.positive("z_grid", 1000),
                               p.nonnegative("max_len", 500));
  return {kExitOk, canonical(to_json(u)), {}};
}

CommandResult find_periodic(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  IFS ifs = cfg.ifs();
  Arc J = p.arc("J", Arc(0.37, 0.05));
  std::string cls = p.str("class", "both");
  if (cls != "both" && cls != "attracting" && cls != "repelling") bad("params.class", "expected attracting, repelling or both");
  int horizon = p.positive("horizon", 5000);
  PeriodicSearchParams sp = search_params(p);
  std::ostringstream out;
  auto line = [&](const char* name, const PeriodicPointRecord& r) {
    Json j = to_json(r);
    j["class"] = name;
    j["J"] = to_json(J);
    out << j.dump() << '\n';
  };
  SequenceModel model = cfg.model_or_uniform();
  if (cls != "repelling") {
    auto attr = find_contracted_fixed_arc(ifs, model, cfg.seed, horizon);
    line("attracting", periodic_in_interval(ifs, J, attr, sp));
  }
  if (cls != "attracting") {
    auto attr = find_contracted_fixed_arc(ifs.inverse_ifs(), model, cfg.seed, horizon);
    line("repelling", repelling_in_interval(ifs, J, attr, sp));
  }
  return {kExitOk, out.str(), {}};
}

CommandResult density(const ExperimentConfig& cfg, const Json&) {
  Params p(cfg.params);
  SweepParams sp;
  sp.model = cfg.model_or_uniform();
  sp.seed = cfg.seed;
  sp.horizon = p.positive("horizon", sp.horizon);
  sp.search = search_params(p);
  SweepReport rep = density_sweep(cfg.ifs(), p.positive("mesh", 20), sp);
  std::ostringstream out;
  out << "arc_index,class,found,word_length,residual,multiplier\n";
  for (const auto& r : rep.rows) {
    out << r.arc_index << ',' << r.cls << ',' << (r.found ? 1 : 0) << ',';
    if (r.record)
      out << r.record->word.size() << ',' << csv_number(r.record->residual) << ',' << csv_number(r.record->multiplier);
    else
      out << "0,,";
    out << '\n';
  }
  return {kExitOk, out.str(), {}};
}

CommandResult dispatch(const std::string& command, const ExperimentConfig& cfg, const Json& options);

CommandResult perturb(const ExperimentConfig& cfg, const Json& options) {
  double size = field::number(options, "size", "options");
  if (!(size > 0.0)) bad("options.size", "must be > 0");
  CounterRng rng(cfg.seed, 0x9e7);
  ExperimentConfig moved = cfg;
  for (auto& g : moved.generators) g = perturb_map(g, size, rng);
  if (const Json* text = field::find(options, "certificate")) {
    if (!text->is_string()) bad("options.certificate", "expected certificate text");
    if (moved.generators.size() != 2) bad("generators", "certificate re-verification needs exactly two generators");
    Json j = Json::object();
    bool ok = true;
    for (const auto& c : certificates_from_text(text->get<std::string>())) {
      Verification v = verify_perturbed(c, moved.generators[0], moved.generators[1]);
      ok = ok && v.ok;
      j[c.direction] = to_json(v);
    }
    j["ok"] = ok;
    j["size"] = size;
    CommandResult res{ok ? kExitOk : kExitVerification, canonical(j), {}};
    if (!ok) res.error = "VerificationFailed: frozen certificate fails for the perturbed generators";
    return res;
  }
  std::string inner = field::string_or(options, "command", "", "options");
  if (inner.empty()) bad("options.command", "perturb needs --command or --certificate");
  if (inner == "perturb") bad("options.command", "cannot nest perturb");
  Json rest = options;
  rest.erase("size");
  rest.erase("command");
  return dispatch(inner, moved, rest);
}

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h = {
      {"simulate-orbit", simulate_orbit}, {"estimate-minimality", estimate_minimality},
      {"classify", classify},             {"detect-repellers", detect},
      {"tail-bound", tail_bound_cmd},     {"certify", certify},
      {"universal-word", universal_word}, {"find-periodic", find_periodic},
      {"density-sweep", density},         {"perturb", perturb},
  };
  return h;
}

CommandResult dispatch(const std::string& command, const ExperimentConfig& cfg, const Json& options) {
  auto it = handlers().find(command);
  if (it == handlers().end()) bad("command", "unknown command '" + command + "'");
  return it->second(cfg, options);
}

}  // namespace

SequenceModel ExperimentConfig::model_or_uniform() const {
  return model ? *model : SequenceModel::uniform(static_cast<int>(generators.size()));
}

ExperimentConfig parse_config(const Json& j) {
  if (!j.is_object()) bad("config", "expected a JSON object");
  static const std::set<std::string> known = {"schema", "generators", "model", "seed", "params", "label", "output"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) bad(it.key(), "unknown field");
  const Json* schema = field::find(j, "schema");
  if (!schema) bad("schema", "missing field (expected 1)");
  if (!schema->is_number_integer() || schema->get<long>() != 1) bad("schema", "unsupported version (expected 1)");
  ExperimentConfig cfg;
  const Json* gens = field::find(j, "generators");
  if (!gens) bad("generators", "missing field");
  if (!gens->is_array() || gens->empty()) bad("generators", "expected a non-empty array of maps");
  for (std::size_t i = 0; i < gens->size(); ++i)
    cfg.generators.push_back(map_from_json((*gens)[i], "generators[" + std::to_string(i) + "]"));
  if (const Json* m = field::find(j, "model")) {
    cfg.model = model_from_json(*m, "model");
    if (cfg.model->alphabet() != static_cast<int>(cfg.generators.size()))
      bad("model", "alphabet size differs from the number of generators");
  }
  if (const Json* s = field::find(j, "seed")) cfg.seed = seed_from(*s, "seed");
  if (const Json* p = field::find(j, "params")) {
    if (!p->is_object()) bad("params", "expected an object");
    cfg.params = *p;
  }
  cfg.label = field::string_or(j, "label", "", "config");
  return cfg;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidModel:
    case ErrorKind::Config: return kExitConfig;
    case ErrorKind::SearchExhausted:
    case ErrorKind::LengthExceeded:
    case ErrorKind::HorizonExceeded: return kExitSearch;
    default: return kExitVerification;
  }
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : handlers()) n.push_back(k);
    return n;
  }();
  return names;
}

CommandResult run_command(const std::string& command, const Json& config, const Json& options) {
  try {
    if (!options.is_object() && !options.is_null()) bad("options", "expected an object");
    const Json opts = options.is_null() ? Json::object() : options;
    if (command == "certify" && field::boolean_or(opts, "check", false, "options")) return check(opts);
    ExperimentConfig cfg = parse_config(config);
    if (const Json* s = field::find(opts, "seed")) cfg.seed = seed_from(*s, "options.seed");
    return dispatch(command, cfg, opts);
  } catch (const Error& e) {
    return {exit_code_for(e.kind()), {}, e.what()};
  } catch (const std::exception& e) {
    return {kExitVerification, {}, std::string("internal error: ") + e.what()};
  }
}

}  // namespace cifs
