#include <string>
#include <vector>

#include "pageguard/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pageguard::run_command(args);
}
