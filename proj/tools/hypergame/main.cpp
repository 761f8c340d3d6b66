#include <iostream>

#include "dispatch.hpp"
#include "run_config.hpp"

int main(int argc, char** argv) {
  using namespace hypergame::cli;
  RunConfig cfg;
  try {
    cfg = parse_config(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << usage();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\nrun with --help for usage\n";
    return 2;
  }
  return dispatch(cfg);
}
