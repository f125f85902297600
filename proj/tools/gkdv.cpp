// gkdv <mode> --config <path> [--set key=value ...] --out <dir>

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gkdv/config.hpp"
#include "gkdv/io.hpp"
#include "gkdv/run.hpp"
#include "gkdv/spectral.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Spectral solvers for the generalized KdV equation"};
  std::string mode, config_path, out_dir, wisdom;
  std::vector<std::string> overrides;
  bool list_keys = false;
  app.add_option("mode", mode, "direct, rescaled, postprocess, sweep or soliton-test")
      ->check(CLI::IsMember({"direct", "rescaled", "postprocess", "sweep", "soliton-test"}));
  app.add_option("--config,-c", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--set,-s", overrides, "override a configuration key (key=value)");
  app.add_option("--out,-o", out_dir, "output directory (overrides output.directory)");
  app.add_option("--fft-wisdom", wisdom, "FFTW wisdom file (also GKDV_FFTW_WISDOM)");
  app.add_flag("--list-keys", list_keys, "print the configuration keys and exit");
  CLI11_PARSE(app, argc, argv);

  if (list_keys) {
    for (const auto& k : gkdv::config_keys()) std::cout << k << "\n";
    return 0;
  }
  if (mode.empty()) {
    std::cerr << "gkdv: a mode is required\n" << app.help();
    return 1;
  }

  try {
    if (!wisdom.empty()) gkdv::set_fft_wisdom_file(wisdom);
    std::string text = config_path.empty() ? std::string() : gkdv::read_text(config_path);
    std::vector<std::string> sets = overrides;
    sets.push_back("mode=" + mode);
    if (!out_dir.empty()) sets.push_back("output.directory=" + out_dir);
    const gkdv::RunConfig cfg = gkdv::parse_config(text, sets);
    const gkdv::RunOutcome outcome = gkdv::run(cfg);
    std::cout << outcome.summary << "\n";
    for (const auto& f : outcome.files) std::cout << "  wrote " << f << "\n";
    return static_cast<int>(outcome.status);
  } catch (const gkdv::ConfigError& e) {
    std::cerr << "gkdv: configuration error: " << e.what() << "\n";
  } catch (const gkdv::ValidationError& e) {
    std::cerr << "gkdv: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "gkdv: " << e.what() << "\n";
  }
  return 1;
}
