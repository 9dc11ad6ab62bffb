#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "commands.hpp"
#include "run_config.hpp"
#include "tca/error.hpp"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitData = 4;

void print_error(const char* category, const std::string& detail) {
  std::string escaped;
  for (char c : detail) {
    if (c == '"' || c == '\\') {
      escaped += '\\';
      escaped += c;
    } else if (c == '\n') {
      escaped += "\\n";
    } else {
      escaped += c;
    }
  }
  std::fprintf(stderr, "{\"error\":\"%s\",\"detail\":\"%s\"}\n", category, escaped.c_str());
}

void print_usage() {
  std::fputs(
      "usage: tca <command> [--config FILE] [--key value ...]\n"
      "\n"
      "commands:\n"
      "  gen        generate a synthetic dataset\n"
      "  train      train a model on a dataset manifest\n"
      "  eval       evaluate a checkpoint, write report.json\n"
      "  attn       export per-sequence attention CSV + PGM heatmaps\n"
      "  gradcheck  finite-difference check of every backward pass\n"
      "\n"
      "`tca <command> --help` lists every accepted key.\n",
      stdout);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage();
    print_error("usage", "missing command");
    return kExitUsage;
  }
  const std::string command = argv[1];
  if (command == "--help" || command == "-h" || command == "help") {
    print_usage();
    return 0;
  }

  try {
    tca::cli::RunConfig cfg = [&] {
      try {
        return tca::cli::make_run_config(command);
      } catch (const tca::ConfigError& e) {
        print_usage();
        print_error("usage", e.what());
        std::exit(kExitUsage);
      }
    }();

    // First pass: --help short-circuits; --config loads before overrides.
    std::vector<std::pair<std::string, std::string>> overrides;
    for (int i = 2; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--help" || arg == "-h") {
        std::fputs(cfg.help_text().c_str(), stdout);
        return 0;
      }
      if (arg.rfind("--", 0) != 0) {
        print_error("usage", "expected --key value, got '" + arg + "'");
        return kExitUsage;
      }
      if (i + 1 >= argc) {
        print_error("usage", "missing value after '" + arg + "'");
        return kExitUsage;
      }
      overrides.emplace_back(arg.substr(2), argv[++i]);
    }
    for (const auto& [key, value] : overrides) {
      if (key == "config") cfg.load_file(value);
    }
    for (const auto& [key, value] : overrides) {
      if (key != "config") cfg.set_override(key, value);
    }

    if (command == "gen") return tca::cli::cmd_gen(cfg);
    if (command == "train") return tca::cli::cmd_train(cfg);
    if (command == "eval") return tca::cli::cmd_eval(cfg);
    if (command == "attn") return tca::cli::cmd_attn(cfg);
    return tca::cli::cmd_gradcheck(cfg);
  } catch (const tca::ConfigError& e) {
    print_error("config", e.what());
    return kExitConfig;
  } catch (const tca::DataError& e) {
    print_error("data", e.what());
    return kExitData;
  } catch (const tca::Error& e) {
    print_error("runtime", e.what());
    return kExitRuntime;
  } catch (const std::exception& e) {
    print_error("runtime", e.what());
    return kExitRuntime;
  }
}
