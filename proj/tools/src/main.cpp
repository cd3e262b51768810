#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include "spikeslab/cli/commands.hpp"

namespace {

extern "C" void on_interrupt(int) { spikeslab::cli::interrupt_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  const std::vector<std::string> args(argv, argv + argc);
  return spikeslab::cli::run(args, std::cout, std::cerr);
}
