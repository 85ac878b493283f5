// Command-line front end: run analyses, validate inputs, convert datasets.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fdea/fdea.hpp"

namespace {

namespace fs = std::filesystem;

struct Overrides {
  std::string dataset;
  std::string config;
  std::string mode;
  std::optional<std::string> alpha;
  std::string weights;
  std::string format;
  std::optional<int> precision;
  bool full_precision = false;
  std::optional<unsigned> threads;
};

fdea::RunConfig load_config(const Overrides& o) {
  fdea::RunConfig cfg = o.config.empty() ? fdea::RunConfig{} : fdea::parse_run_config(o.config);
  if (!o.mode.empty()) cfg.mode = fdea::parse_mode(o.mode);
  if (o.alpha) cfg.model.alpha_grid = fdea::parse_alpha_grid(*o.alpha);
  if (!o.weights.empty()) {
    const auto parts = fdea::detail::split(o.weights);
    const auto w1 = parts.size() == 2 ? fdea::detail::parse_number(parts[0]) : std::nullopt;
    const auto w2 = parts.size() == 2 ? fdea::detail::parse_number(parts[1]) : std::nullopt;
    if (!w1 || !w2) throw fdea::ValidationError("--weights expects 'w1,w2'");
    cfg.model.w1 = *w1;
    cfg.model.w2 = *w2;
  }
  if (!o.format.empty()) cfg.format = fdea::parse_format(o.format);
  if (o.precision) cfg.precision = *o.precision;
  if (o.full_precision) cfg.full_precision = true;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

int run(const Overrides& o, const std::string& out_dir, bool verbose) {
  const auto data = fdea::parse_dataset(o.dataset);
  const auto cfg = load_config(o);
  cfg.model.validate_for(data);
  if (verbose) {
    std::cerr << "dataset: " << data.size() << " DMUs; alpha levels: "
              << cfg.model.alpha_grid.size() << "; weights: " << cfg.model.w1 << "/"
              << cfg.model.w2 << "\n";
  }

  const auto out = fdea::run_analysis(data, cfg);
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";

  const auto tables = fdea::build_tables(out);
  const fdea::NumberFormat nf{cfg.precision, cfg.full_precision};
  if (out_dir.empty()) {
    for (const auto& t : tables) {
      if (cfg.format != fdea::OutputFormat::kMarkdown) std::cout << "## " << t.name << "\n";
      std::cout << fdea::render(t, cfg.format, nf) << "\n";
    }
  } else {
    for (const auto& p : fdea::write_tables(out_dir, tables, cfg.format, nf)) {
      if (verbose) std::cerr << "wrote " << p.string() << "\n";
    }
  }
  return EXIT_SUCCESS;
}

int validate(const Overrides& o) {
  const auto data = fdea::parse_dataset(o.dataset);
  const auto cfg = load_config(o);
  cfg.model.validate_for(data);
  std::cout << o.dataset << ": " << data.size() << " DMUs, " << data.m1() << " stage-1 inputs, "
            << data.s1() << " stage-1 outputs, " << data.intermediates() << " intermediates, "
            << data.m2() << " stage-2 inputs, " << data.s2() << " stage-2 outputs\n"
            << "config OK: " << cfg.model.alpha_grid.size() << " alpha levels, big-M "
            << cfg.model.big_m << " (needs more than "
            << fdea::ModelConfig::required_big_m(data) << ")\n";
  return EXIT_SUCCESS;
}

int convert(const std::string& in, const std::string& out) {
  const auto data = fdea::parse_dataset(in);
  if (fs::exists(out) && fs::equivalent(in, out)) {
    throw fdea::ValidationError("refusing to overwrite the input file");
  }
  fdea::write_dataset(out, data);
  return EXIT_SUCCESS;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-d,--dataset", o.dataset, "Dataset file (.csv, or .json)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-c,--config", o.config, "Run configuration (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("-m,--mode", o.mode, "two-stage, blackbox, sensitivity or full");
  cmd->add_option("-a,--alpha", o.alpha, "Alpha grid: 'a,b,c' or 'start:stop:step'");
  cmd->add_option("-w,--weights", o.weights, "Stage weights 'w1,w2'");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy two-stage DEA efficiency analysis"};
  app.require_subcommand(1);

  Overrides o;
  std::string out_dir;
  bool verbose = false;
  auto* run_cmd = app.add_subcommand("run", "Evaluate every DMU and write report tables");
  add_common(run_cmd, o);
  run_cmd->add_option("-o,--out-dir", out_dir, "Directory for report files (default: stdout)");
  run_cmd->add_option("-f,--format", o.format, "csv, json or markdown");
  run_cmd->add_option("-p,--precision", o.precision, "Decimals in reports (default 4)");
  run_cmd->add_flag("--full-precision", o.full_precision, "Print shortest round-trip values");
  run_cmd->add_flag("-v,--verbose", verbose, "Progress on stderr");

  Overrides vo;
  auto* validate_cmd = app.add_subcommand("validate", "Check a dataset and configuration");
  add_common(validate_cmd, vo);

  std::string conv_in, conv_out;
  auto* convert_cmd = app.add_subcommand("convert", "Convert a dataset between CSV and JSON");
  convert_cmd->add_option("input", conv_in, "Source dataset")->required()->check(CLI::ExistingFile);
  convert_cmd->add_option("output", conv_out, "Target path; the extension picks the format")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(o, out_dir, verbose);
    if (*validate_cmd) return validate(vo);
    if (*convert_cmd) return convert(conv_in, conv_out);
  } catch (const fdea::SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return EXIT_FAILURE;
}
