#include <string>
#include <vector>

#include "ngg/cli.hpp"

int main(int argc, char** argv) {
  return ngg::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
