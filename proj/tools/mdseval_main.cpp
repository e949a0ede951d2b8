#include <vector>

#include "mdseval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mdseval::cli::dispatch(args);
}
