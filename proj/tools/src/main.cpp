#include <cstdlib>
#include <iostream>

#include "diffvec/error.hpp"
#include "diffvec_cli/cli.hpp"

int main(int argc, char** argv) {
  using namespace diffvec::cli;
  std::vector<std::string> args(argv + 1, argv + argc);
  std::optional<std::string> env_seed;
  if (const char* s = std::getenv("DIFFVEC_SEED")) env_seed = s;
  try {
    auto parsed = parse_args(args, env_seed);
    if (!parsed.config) {
      std::cout << parsed.help;
      return 0;
    }
    for (const auto& w : parsed.config->warnings) std::cerr << "warning: " << w << "\n";
    return run(*parsed.config, std::cout, std::cerr);
  } catch (const UsageError& e) {
    std::cerr << "diffvec: " << e.what() << "\nRun 'diffvec --help' for usage.\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "diffvec: error: " << e.what() << "\n";
    return 1;
  }
}
