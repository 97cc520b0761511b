// Command line front end: runs verification suites over randomly drawn
// instances and explains single instances.  Exit codes: 0 all checks passed,
// 1 at least one check failed, 2 usage or configuration error.
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corrlab/suites.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

corrlab::SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw corrlab::Error(corrlab::Err::BadConfig, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw corrlab::Error(corrlab::Err::BadConfig,
                         std::string("config parse: ") + ex.what());
  }
  if (!j.is_object())
    throw corrlab::Error(corrlab::Err::BadConfig, "config must be an object");
  corrlab::SuiteConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "depth") cfg.depth = value.get<int>();
      else if (key == "instances_per_suite")
        cfg.instances_per_suite = value.get<int>();
      else if (key == "suites")
        cfg.suites = value.get<std::vector<std::string>>();
      else if (key == "tolerance") {
        for (const auto& [tk, tv] : value.items()) {
          if (tk == "eps_rank") cfg.tolerance.eps_rank = tv.get<double>();
          else if (tk == "eps_eq") cfg.tolerance.eps_eq = tv.get<double>();
          else if (tk == "eps_psd") cfg.tolerance.eps_psd = tv.get<double>();
          else
            throw corrlab::Error(corrlab::Err::BadConfig,
                                 "unknown tolerance key " + tk);
        }
      } else if (key == "caps") {
        for (const auto& [ck, cv] : value.items()) {
          if (ck == "max_blocks") cfg.caps.max_blocks = cv.get<int>();
          else if (ck == "max_block_size")
            cfg.caps.max_block_size = cv.get<int>();
          else if (ck == "max_multiplicity")
            cfg.caps.max_multiplicity = cv.get<int>();
          else if (ck == "max_quiver_entry")
            cfg.caps.max_quiver_entry = cv.get<int>();
          else
            throw corrlab::Error(corrlab::Err::BadConfig,
                                 "unknown caps key " + ck);
        }
      } else {
        throw corrlab::Error(corrlab::Err::BadConfig,
                             "unknown config key " + key);
      }
    }
  } catch (const json::exception& ex) {
    throw corrlab::Error(corrlab::Err::BadConfig,
                         std::string("config value: ") + ex.what());
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verification suites for correspondence machinery over "
               "multi-matrix algebras"};
  app.require_subcommand(1);

  std::string config_path, out_path, instance_text;
  std::vector<std::string> suites;
  std::uint64_t seed = 0;
  int depth = 0, instances = -1;
  double tol = 0;
  bool markdown = false;

  std::string suite_list;
  for (const auto& n : corrlab::suite_names())
    suite_list += (suite_list.empty() ? "" : ", ") + n;

  CLI::App* run = app.add_subcommand("run", "run verification suites");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--suite", suites, "suite to run (" + suite_list + ")");
  auto* seed_opt = run->add_option("--seed", seed, "master random seed");
  auto* depth_opt = run->add_option("--depth", depth, "graded depth, at least 2 for dilation and model suites");
  auto* tol_opt = run->add_option("--tol", tol, "rank and equality tolerance");
  auto* inst_opt = run->add_option("--instances", instances, "instances per suite");
  run->add_option("--out", out_path, "write the JSON report to this file");
  run->add_flag("--markdown", markdown, "print a markdown rendering instead of JSON");

  CLI::App* explain = app.add_subcommand("explain", "explain one instance");
  explain->add_option("--instance", instance_text, "instance descriptor JSON")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (explain->parsed()) {
      std::cout << corrlab::explain_instance(instance_text);
      return 0;
    }

    corrlab::SuiteConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!suites.empty()) cfg.suites = suites;
    if (seed_opt->count()) cfg.seed = seed;
    if (depth_opt->count()) cfg.depth = depth;
    if (inst_opt->count()) cfg.instances_per_suite = instances;
    if (tol_opt->count()) {
      if (tol <= 0)
        throw corrlab::Error(corrlab::Err::BadConfig, "tol must be positive");
      cfg.tolerance.eps_rank = tol;
      cfg.tolerance.eps_eq = tol;
      cfg.tolerance.eps_psd = tol * 0.1;
    }

    corrlab::Report report = corrlab::run_suites(cfg);
    std::string rendered = corrlab::report_json(report);
    if (!out_path.empty()) {
      std::ofstream out(out_path);
      if (!out)
        throw corrlab::Error(corrlab::Err::BadConfig,
                             "cannot write report to " + out_path);
      out << rendered;
    }
    if (markdown)
      std::cout << corrlab::report_markdown(report);
    else
      std::cout << rendered;
    return report.all_pass() ? 0 : 1;
  } catch (const corrlab::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
}
