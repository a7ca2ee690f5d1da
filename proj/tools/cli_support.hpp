#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "itolab/model_spec.hpp"

namespace itolab::cli {

/// Options registered here are echoed into the run manifest and can be filled
/// from a key-value config file (keys are the long option names).
class Settings {
 public:
  explicit Settings(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& key, T& value, const std::string& help) {
    CLI::Option* opt = app_->add_option("--" + key, value, help)->capture_default_str();
    entries_.push_back({key, opt, [&value] { return show(value); }});
    return opt;
  }

  CLI::Option* flag(const std::string& key, bool& value, const std::string& help) {
    CLI::Option* opt = app_->add_flag("--" + key, value, help);
    entries_.push_back({key, opt, [&value] { return show(value); }});
    return opt;
  }

  /// Fills options that were not given on the command line. Unknown keys are
  /// a ParseError at the key's position.
  void apply(const std::vector<KeyValue>& entries) const;

  std::string text() const;

 private:
  struct Entry {
    std::string key;
    CLI::Option* option;
    std::function<std::string()> show;
  };

  static std::string show(double v);
  static std::string show(bool v) { return v ? "true" : "false"; }
  static std::string show(const std::string& v) { return v; }
  static std::string show(const std::vector<double>& v);
  template <class T>
  static std::string show(const T& v) {
    return std::to_string(v);
  }

  CLI::App* app_;
  std::vector<Entry> entries_;
};

/// Malformed config file; the message starts with "file:line:column:".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// State shared by every subcommand.
struct Common {
  std::string config;
  std::string out;
  unsigned workers = 0;
  std::vector<std::string> model_tokens;  // model name then key=value tokens
};

/// --config, --out and --workers; `model` adds the positional model spec.
void add_common(CLI::App* app, Settings& settings, Common& common, bool model, bool out_required);

/// Reads --config (if any) into `settings`. For model commands the model keys
/// are taken from the config unless a model was given on the command line.
/// Returns the model spec (empty name for commands without one).
ModelSpec resolve(const CLI::App& app, const Settings& settings, const Common& common, bool model);

/// Creates the output directory and writes manifest.txt into it.
void write_manifest(const std::filesystem::path& dir, const std::string& subcommand, const ModelSpec* model,
                    const Settings& settings, const std::string& extra = {});

/// "lo:hi" into a pair with lo < hi.
std::pair<double, double> parse_interval(const std::string& text);
/// "lo:hi:n" into n >= 2 evenly spaced points including both ends.
std::vector<double> parse_grid(const std::string& text);
/// "a,b,c" or "lo:hi:step" (inclusive, exact in rationals).
std::vector<Rational> parse_rational_list(const std::string& text);

/// "%.17g"; round-trips through strtod.
std::string num(double v);

}  // namespace itolab::cli
