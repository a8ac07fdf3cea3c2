// Command-line front end: run, validate and coeffs subcommands.

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "ivf/coeffs.hpp"
#include "ivf/csv.hpp"
#include "ivf/errors.hpp"
#include "ivf/experiment.hpp"

namespace {

int load_config(const std::string& path, ivf::Json& out) {
  std::ifstream is(path);
  if (!is) {
    std::cerr << "error: cannot read config " << path << '\n';
    return ivf::exit_code::io;
  }
  try {
    out = ivf::Json::parse(is);
  } catch (const ivf::Json::parse_error& e) {
    std::cerr << "error: " << path << " is not valid JSON: " << e.what() << '\n';
    return ivf::exit_code::schema;
  }
  return ivf::exit_code::ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpolating vector fields of near-identity maps"};
  app.set_version_flag("--version", std::string(IVF_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "Suppress progress output");

  auto* validate = app.add_subcommand("validate", "Check a config and print a cost estimate");
  validate->add_option("--config", config_path, "Experiment config (JSON)")->required();
  validate->add_flag("--quiet", quiet, "Print only errors");

  int order = 0;
  auto* coeffs = app.add_subcommand("coeffs", "Print the interpolation coefficients p_nk as CSV");
  coeffs->add_option("-n,--order", order, "Order n")->required()->check(CLI::Range(1, ivf::kMaxOrder));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version land here with a zero code.
    return app.exit(e) == 0 ? ivf::exit_code::ok : ivf::exit_code::usage;
  }

  if (*coeffs) {
    ivf::CoeffTable(order).write_csv(std::cout);
    return ivf::exit_code::ok;
  }

  ivf::Json config;
  if (const int rc = load_config(config_path, config); rc != ivf::exit_code::ok) return rc;

  if (*validate) {
    const ivf::ValidationReport r = ivf::validate_config(config);
    for (const std::string& e : r.errors) std::cerr << "error: " << e << '\n';
    if (!r.ok()) return ivf::exit_code::schema;
    if (!quiet) {
      for (const std::string& n : r.notes) std::cout << "note: " << n << '\n';
      std::cout << "ok: estimated map applications " << ivf::fmt_num(r.estimated_map_applications) << '\n';
    }
    return ivf::exit_code::ok;
  }

  ivf::RunOptions opts;
  opts.out_dir = out_dir;
  opts.workers = workers;
  opts.quiet = quiet;
  if (!quiet) {
    const ivf::ValidationReport r = ivf::validate_config(config);
    if (r.ok())
      std::cerr << "estimated map applications " << ivf::fmt_num(r.estimated_map_applications) << '\n';
  }
  const ivf::RunSummary s = ivf::run_experiment(config, opts);
  if (s.exit_code != ivf::exit_code::ok) std::cerr << "error: " << s.message << '\n';
  if (!quiet) {
    for (const auto& p : s.outputs) std::cerr << "wrote " << p.string() << '\n';
    std::cerr << "map applications " << s.map_applications << ", wall time " << ivf::fmt_num(s.wall_time_s)
              << " s, failures " << s.failures << '\n';
  }
  return s.exit_code;
}
