#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  cftg::cli::RunConfig config;
  if (auto code = cftg::cli::parse_args(argc, argv, config, std::cout, std::cerr)) return *code;
  return cftg::cli::run(config, std::cout, std::cerr);
}
