#include <iostream>

#include "edstereo/cli.hpp"

int main(int argc, char** argv) {
  const auto parsed = edstereo::cli::parse_args(argc, argv);
  if (!parsed.config) {
    (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message << "\n";
    return parsed.exit_code;
  }
  return edstereo::cli::run(*parsed.config, std::cout, std::cerr);
}
