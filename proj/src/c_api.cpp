// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
#include "circle_ifs.h"

#include <new>
#include <string>

#include "errors.hpp"
#include "experiments.hpp"
#include "parallel.hpp"

struct cifs_map {
  cifs::LiftMap map;
};

struct cifs_ifs {
  cifs::IFS ifs;
};

struct cifs_output {
  std::string text;
  std::string error;
};

namespace {

thread_local std::string t_last_error;

cifs_status status_for(cifs::ErrorKind kind) {
  using cifs::ErrorKind;
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidModel: return CIFS_ERR_INVALID_ARGUMENT;
    case ErrorKind::Config: return CIFS_ERR_CONFIG;
    case ErrorKind::ConvergenceFailure: return CIFS_ERR_CONVERGENCE;
    case ErrorKind::SearchExhausted:
    case ErrorKind::LengthExceeded:
    case ErrorKind::HorizonExceeded: return CIFS_ERR_SEARCH;
    default: return CIFS_ERR_VERIFICATION;
  }
}

template <class F>
cifs_status guard(F&& body) {
  try {
    body();
    t_last_error.clear();
    return CIFS_OK;
  } catch (const cifs::Error& e) {
    t_last_error = e.what();
    return status_for(e.kind());
  } catch (const std::bad_alloc&) {
    t_last_error = "out of memory";
    return CIFS_ERR_INTERNAL;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return CIFS_ERR_INTERNAL;
  }
}

cifs_status null_arg(const char* what) {
  t_last_error = std::string("InvalidArgument: null ") + what;
  return CIFS_ERR_INVALID_ARGUMENT;
}

void emit(const cifs::CommandResult& r, cifs_output** out) {
  t_last_error = r.error;
  if (!out) return;
  *out = new (std::nothrow) cifs_output{r.output, r.error};
}

}  // namespace

extern "C" {

const char* cifs_version(void) { return "0.1.0"; }
const char* cifs_last_error(void) { return t_last_error.c_str(); }

void cifs_set_threads(int n) { cifs::set_thread_count(n); }
int cifs_get_threads(void) { return cifs::thread_count(); }

cifs_status cifs_map_from_json(const char* json, cifs_map** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  return guard([&] {
    cifs::LiftMap m = cifs::map_from_json(cifs::parse_json(json, "map"));
    *out = new cifs_map{std::move(m)};
  });
}

void cifs_map_free(cifs_map* map) { delete map; }

cifs_status cifs_map_eval(const cifs_map* map, double x, double* out) {
  if (!map || !out) return null_arg("argument");
  return guard([&] { *out = map->map(cifs::CirclePoint(x)).value(); });
}

cifs_status cifs_map_deriv(const cifs_map* map, double x, double* out) {
  if (!map || !out) return null_arg("argument");
  return guard([&] { *out = map->map.deriv(cifs::CirclePoint(x)); });
}

cifs_status cifs_map_inverse_eval(const cifs_map* map, double y, double* out) {
  if (!map || !out) return null_arg("argument");
  return guard([&] { *out = map->map.inverse_eval(cifs::CirclePoint(y)).value(); });
}

cifs_status cifs_map_rotation_number(const cifs_map* map, long n_iters, double* out) {
  if (!map || !out) return null_arg("argument");
  return guard([&] { *out = cifs::rotation_number(map->map, n_iters); });
}

cifs_status cifs_ifs_create(const cifs_map* const* maps, size_t n, cifs_ifs** out) {
  if (!maps || !out) return null_arg("argument");
  return guard([&] {
    std::vector<cifs::LiftMap> gens;
    for (size_t i = 0; i < n; ++i) {
      if (!maps[i]) throw cifs::Error(cifs::ErrorKind::InvalidArgument, "null map in list");
      gens.push_back(maps[i]->map);
    }
    *out = new cifs_ifs{cifs::IFS(std::move(gens))};
  });
}

void cifs_ifs_free(cifs_ifs* ifs) { delete ifs; }

cifs_status cifs_ifs_branch_apply(const cifs_ifs* ifs, const int* word, size_t len, double x, double* out) {
  if (!ifs || !out || (!word && len > 0)) return null_arg("argument");
  return guard([&] {
    cifs::Word w(std::vector<int>(word, word + len), ifs->ifs.size());
    *out = cifs::branch_apply(ifs->ifs, w, cifs::CirclePoint(x)).value();
  });
}

int cifs_run_command(const char* command, const char* config_json, const char* options_json, cifs_output** out) {
  if (out) *out = nullptr;
  cifs::CommandResult r;
  try {
    if (!command) throw cifs::Error(cifs::ErrorKind::InvalidArgument, "null command");
    cifs::Json cfg = config_json ? cifs::parse_json(config_json, "config") : cifs::Json::object();
    cifs::Json opts = options_json ? cifs::parse_json(options_json, "options") : cifs::Json::object();
    r = cifs::run_command(command, cfg, opts);
  } catch (const cifs::Error& e) {
    r = {cifs::exit_code_for(e.kind()), {}, e.what()};
  } catch (const std::exception& e) {
    r = {cifs::kExitVerification, {}, e.what()};
  }
  emit(r, out);
  return r.exit_code;
}

const char* cifs_output_text(const cifs_output* out) { return out ? out->text.c_str() : ""; }
const char* cifs_output_error(const cifs_output* out) { return out ? out->error.c_str() : ""; }
void cifs_output_free(cifs_output* out) { delete out; }

int cifs_certificate_check(const char* certificate_json, cifs_output** out) {
  if (out) *out = nullptr;
  if (!certificate_json) {
    emit({cifs::kExitConfig, {}, "InvalidArgument: null certificate"}, out);
    return cifs::kExitConfig;
  }
  cifs::Json opts = {{"check", true}, {"certificate", std::string(certificate_json)}};
  cifs::CommandResult r = cifs::run_command("certify", cifs::Json::object(), opts);
  emit(r, out);
  return r.exit_code;
}

}  // extern "C"
