#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json.hpp"
#include "wigner/errors.hpp"

namespace {

int report(const char* kind, const std::string& message, int code,
           const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j = {{"status", "error"}, {"kind", kind}, {"message", message}, {"exit_code", code}};
  j.update(extra);
  std::cerr << j.dump() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wigner::cli;

  CLI::App app{"Phase-space entropy production in the driven Duffing oscillator"};
  app.require_subcommand(1);

  CommonOptions common;
  std::optional<std::string> input_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file");
    sub->add_option("--set", common.overrides, "Override a config value: dotted.key=value")
        ->allow_extra_args(false);
    sub->add_option("--out", common.out_dir, "Output directory");
    sub->add_option("--workers", common.workers, "Worker threads (0: available parallelism)");
  };

  auto* run = app.add_subcommand("run", "Evolve one Wigner function and record diagnostics");
  auto* sweep = app.add_subcommand("sweep", "Run every (hbar, D) pair of the scaling groups");
  auto* collapse = app.add_subcommand("collapse", "Analyse the CSV outputs of a finished sweep");
  auto* lyap = app.add_subcommand("lyapunov", "Ensemble maximal Lyapunov exponent");
  auto* oracle = app.add_subcommand("oracle-check", "Compare the PDE against the Gaussian oracle");
  for (auto* sub : {run, sweep, collapse, lyap, oracle}) add_common(sub);
  collapse->add_option("--input", input_dir, "Directory holding the sweep CSVs (default: --out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(common);
    if (*sweep) return cmd_sweep(common);
    if (*collapse) return cmd_collapse(common, input_dir);
    if (*lyap) return cmd_lyapunov(common);
    if (*oracle) return cmd_oracle_check(common);
  } catch (const wigner::ConfigError& e) {
    return report("config", e.what(), kExitConfig, {{"field", e.field()}});
  } catch (const wigner::DataError& e) {
    return report("data", e.what(), kExitConfig);
  } catch (const wigner::NumericalError& e) {
    nlohmann::json extra = nlohmann::json::object();
    if (e.step()) extra["step"] = *e.step();
    if (e.time()) extra["time"] = *e.time();
    return report("numerical", e.what(), kExitNumerical, extra);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
  return kExitConfig;
}
