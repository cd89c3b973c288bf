#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  return genesem::cli::dispatch(std::vector<std::string>(argv, argv + argc));
}
