#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "focus/cli/commands.hpp"
#include "focus/cli/run_config.hpp"

int main(int argc, char** argv) {
  using namespace focus::cli;

  CLI::App app{"Uncertainty-gated focus refinement: data, training, evaluation and theory tables"};
  std::string command;
  std::string config_path;
  std::string commands_help;
  for (const auto& name : command_names()) commands_help += (commands_help.empty() ? "" : ", ") + name;
  app.add_option("command", command, "one of: " + commands_help)->required();
  app.add_option("--config", config_path, "file of `key = value` lines; flags override it");

  std::map<std::string, std::string> flags;
  for (const auto& key : known_keys()) {
    std::string help = key.help;
    if (!key.default_value.empty()) help += " [default: " + key.default_value + "]";
    app.add_option("--" + key.name, flags[key.name], help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config_file(config_path);
    for (const auto& key : known_keys()) {
      if (app.count("--" + key.name) > 0) config.set(key.name, flags[key.name]);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run_command(command, config, std::cout, std::cerr);
}
