#include <csignal>
#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "cli.hpp"

namespace {

extern "C" void on_interrupt(int) { lnsim::cli::cancel_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("lnsim"));
  std::signal(SIGINT, on_interrupt);
  std::signal(SIGTERM, on_interrupt);
  return lnsim::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
