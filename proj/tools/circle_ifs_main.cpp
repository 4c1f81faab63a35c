// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// circle-ifs: command-line front end over the C library.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "circle_ifs.h"
#include "json.hpp"

namespace {

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

bool read_file(const std::string& path, std::string& text) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  text = ss.str();
  return true;
}

int run(const std::string& command, const Common& c, nlohmann::json options) {
  cifs_set_threads(c.threads);
  std::string config = "{}";
  if (!c.config.empty() && !read_file(c.config, config)) {
    std::cerr << "circle-ifs: cannot read config file " << c.config << "\n";
    return 1;
  }
  if (c.seed) options["seed"] = *c.seed;
  cifs_output* out = nullptr;
  int code = cifs_run_command(command.c_str(), config.c_str(), options.dump().c_str(), &out);
  std::string text = cifs_output_text(out);
  std::string err = cifs_output_error(out);
  cifs_output_free(out);
  if (!text.empty()) {
    if (c.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(c.out, std::ios::binary);
      if (!f || !(f << text)) {
        std::cerr << "circle-ifs: cannot write " << c.out << "\n";
        return 1;
      }
    }
  }
  if (!err.empty()) std::cerr << "circle-ifs " << command << ": " << err << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and certification toolkit for IFSs of circle homeomorphisms"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cifs_version()));

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"simulate-orbit", "random orbit along a sampled branch (CSV n,letter,point)"},
      {"estimate-minimality", "forward and backward orbit-density report"},
      {"classify", "synchronization evidence and Antonov case"},
      {"detect-repellers", "random repellers of a sampled branch"},
      {"tail-bound", "hitting-time tail table (CSV n,empirical,bound,stderr)"},
      {"certify", "robust minimality certificates, or --check an existing one"},
      {"universal-word", "word sending every point into a target arc"},
      {"find-periodic", "periodic points inside an arc (JSON lines)"},
      {"density-sweep", "periodic points on a mesh of arcs (CSV)"},
      {"perturb", "perturb the generators and re-run a command or re-check a certificate"},
  };

  Common common;
  std::string check_file, cert_file, inner;
  double size = 0.0;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", common.config, "experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--out", common.out, "write output to this file instead of stdout");
    sub->add_option("--seed", common.seed, "override the config seed");
    sub->add_option("--threads", common.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    if (name == "certify") sub->add_option("--check", check_file, "certificate file to re-verify")->check(CLI::ExistingFile);
    if (name == "perturb") {
      sub->add_option("--size", size, "C^1 size of the perturbation")->required();
      sub->add_option("--command", inner, "command to re-run on the perturbed config");
      sub->add_option("--certificate", cert_file, "re-verify this certificate's frozen words instead")
          ->check(CLI::ExistingFile);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    const std::string name = sub->get_name();
    nlohmann::json options = nlohmann::json::object();
    if (name == "certify" && !check_file.empty()) {
      std::string text;
      if (!read_file(check_file, text)) {
        std::cerr << "circle-ifs: cannot read " << check_file << "\n";
        return 1;
      }
      options["check"] = true;
      options["certificate"] = text;
    } else if (common.config.empty()) {
      std::cerr << "circle-ifs " << name << ": --config is required\n";
      return 1;
    }
    if (name == "perturb") {
      options["size"] = size;
      if (!inner.empty()) options["command"] = inner;
      if (!cert_file.empty()) {
        std::string text;
        if (!read_file(cert_file, text)) {
          std::cerr << "circle-ifs: cannot read " << cert_file << "\n";
          return 1;
        }
        options["certificate"] = text;
      }
    }
    return run(name, common, options);
  }
  return 1;
}
