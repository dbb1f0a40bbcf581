// gradjump <command> [--config file] [--seed n] [--out dir] [--format json|csv]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"

#include "gradjump/commands.hpp"
#include "gradjump/error.hpp"

namespace fs = std::filesystem;
using namespace gradjump;

namespace {

int fail_config(const std::exception& e) {
  std::cerr << "gradjump: " << e.what() << "\n";
  std::cout << error_to_json(e).dump(2) << "\n";
  return kExitConfig;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jump conditions and interchange variations for phase interfaces"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> format;
  const std::map<std::string, std::string> help{
      {"check", "jump-condition residuals and verdicts for a pair"},
      {"sweep-h", "Monte Carlo interchange energy over an h grid, extrapolated to h = 0"},
      {"path-dt", "D(t) along the interchange path"},
      {"envelope", "rank-one hull along the segment, affine check, endpoint slopes"},
      {"antiplane", "closed-form anti-plane envelope, yield circle and loading"},
      {"scan", "Weierstrass scan at given points"},
  };
  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--seed", seed, "quadrature seed (overrides the config)");
    sub->add_option("--out", out_dir, "directory for summary.json and CSV tables");
    sub->add_option("--format", format, "stdout format")->check(CLI::IsMember({"json", "csv"}));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  RunConfig config;
  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path, std::ios::binary);
      if (!is) throw ConfigError("cannot read config file " + config_path);
      std::stringstream ss;
      ss << is.rdbuf();
      config = parse_config(ss.str());
    }
  } catch (const Error& e) {
    return fail_config(e);
  }
  if (seed) config.interchange.quadrature.seed = *seed;
  if (out_dir) config.outputs.dir = *out_dir;
  if (format) config.outputs.format = *format;

  const CommandResult result = run_command(command, config);
  if (result.summary.contains("error")) {
    std::cerr << "gradjump " << command << ": " << result.summary["error"]["message"].get<std::string>() << "\n";
    std::cout << result.summary.dump(2) << "\n";
    return result.exit_code;
  }

  try {
    if (config.outputs.dir) {
      const fs::path dir(*config.outputs.dir);
      fs::create_directories(dir);
      write_file(dir / "summary.json", result.summary.dump(2) + "\n");
      for (const auto& t : result.tables) write_file(dir / (t.name + ".csv"), t.render());
    }
    if (config.outputs.format == "csv") {
      if (!result.tables.empty()) std::cout << result.tables.front().render();
    } else {
      std::cout << result.summary.dump(2) << "\n";
    }
  } catch (const std::exception& e) {
    return fail_config(e);
  }
  return result.exit_code;
}
