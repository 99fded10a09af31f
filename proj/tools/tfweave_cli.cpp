// Command-line front end: one subcommand per experiment.
//
// Exit codes: 0 all checks passed, 2 a check failed, 1 configuration or runtime error.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "tfweave/experiments.hpp"

namespace {

std::string flag_for(const std::string& key) { return key == "compare_L" ? "--compare-L" : "--" + key; }

const std::map<std::string, std::string>& help_text() {
  static const std::map<std::string, std::string> h{
      {"N", "grid size (even, >= 8)"},
      {"L1", "dilation of the first Gaussian window"},
      {"L2", "dilation of the second Gaussian window"},
      {"L", "dilation / ellipse shape"},
      {"compare_L", "second ellipse shape for the shape-independence check"},
      {"R", "ellipse radius"},
      {"kmax", "number of eigenvalues to compare"},
      {"kind", "window kind: gaussian or hermite"},
      {"c", "chirp rate of the Gaussian window"},
      {"k", "Hermite order"},
      {"a", "lattice step in time"},
      {"b", "lattice step in frequency"},
      {"shape", "bump shape: box or tent"},
      {"eps", "eigenvalue threshold in (0,1), or 'rule'"},
      {"strategy", "exhaustive, random or adversarial-greedy"},
      {"samples", "evaluation budget for sampled searches"},
      {"seed", "random seed"},
      {"fixture", "none or swapped-bases (the two orthonormal bases of R^2 in opposite orders)"},
  };
  return h;
}

void print(const tfweave::ResultRecord& rec, const std::string& json_path) {
  std::cout << rec.experiment << '\n';
  for (const auto& [k, v] : rec.labels) std::cout << "  " << k << ": " << v << '\n';
  for (const auto& [k, v] : rec.scalars) std::cout << "  " << k << " = " << tfweave::format_number(v) << '\n';
  for (const auto& f : rec.failed_checks) std::cout << "  CHECK FAILED: " << f << '\n';
  std::cout << "  result: " << json_path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Woven time-frequency frames: localization operators, eigenframes and weaving checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::map<std::string, std::map<std::string, std::string>> flags;

  for (const auto& name : tfweave::command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value configuration file");
    sub->add_option("--out", out_dir, "output directory (default: $TFWEAVE_OUT_DIR, else ./tfweave-out)");
    for (const auto& key : tfweave::ExperimentConfig::keys_for(name)) {
      sub->add_option_function<std::string>(
          flag_for(key), [&flags, name, key](const std::string& v) { flags[name][key] = v; }, help_text().at(key));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    tfweave::ConfigMap merged;
    if (!config_path.empty()) merged = tfweave::load_config(config_path);
    for (const auto& [k, v] : flags[command]) merged[k] = v;
    const tfweave::ExperimentConfig cfg = tfweave::make_config(command, merged);

    if (out_dir.empty()) {
      const char* env = std::getenv("TFWEAVE_OUT_DIR");
      out_dir = env && *env ? env : "tfweave-out";
    }
    const tfweave::ResultRecord rec = tfweave::run_experiment(cfg, out_dir);
    print(rec, (std::filesystem::path(out_dir) / (rec.experiment + ".json")).string());
    return rec.checks_passed() ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
