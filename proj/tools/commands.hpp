#pragma once

#include <memory>
#include <vector>

#include <CLI11.hpp>

namespace itolab::cli {

class Command {
 public:
  virtual ~Command() = default;
  /// Runs after a successful parse; returns the process exit code.
  virtual int run() = 0;

  CLI::App* app = nullptr;
};

std::vector<std::unique_ptr<Command>> register_commands(CLI::App& root);

}  // namespace itolab::cli
