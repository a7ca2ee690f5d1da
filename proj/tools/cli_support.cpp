#include "cli_support.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"
#include "itolab/io.hpp"

#ifndef ITOLAB_VERSION
#define ITOLAB_VERSION "unknown"
#endif

namespace itolab::cli {

namespace {

// Written by write_manifest and skipped when a manifest is read back as config.
bool is_metadata(const std::string& key) {
  return key == "subcommand" || key == "tool_version" || key == "timestamp" || key == "output" ||
         key.rfind("info.", 0) == 0;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || !std::isfinite(v))
    throw std::invalid_argument("not a finite number: '" + text + "'");
  return v;
}

}  // namespace

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Settings::show(double v) { return num(v); }

std::string Settings::show(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

void Settings::apply(const std::vector<KeyValue>& entries) const {
  for (const auto& kv : entries) {
    if (is_metadata(kv.key)) {
      if (kv.key == "subcommand" && kv.value != app_->get_name())
        throw ParseError("manifest is for '" + kv.value + "', not '" + app_->get_name() + "'", kv.line,
                         kv.value_column);
      continue;
    }
    const Entry* entry = nullptr;
    for (const auto& e : entries_)
      if (e.key == kv.key) entry = &e;
    if (entry == nullptr) throw ParseError("unknown key '" + kv.key + "'", kv.line, kv.column);
    if (entry->option->count() > 0) continue;  // the command line wins
    try {
      entry->option->add_result(kv.value);
      entry->option->run_callback();
    } catch (const CLI::Error& e) {
      throw ParseError("bad value for '" + kv.key + "': " + e.what(), kv.line, kv.value_column);
    }
  }
}

std::string Settings::text() const {
  std::string s;
  for (const auto& e : entries_) {
    const std::string v = e.show();
    if (!v.empty()) s += e.key + " = " + v + "\n";  // empty means unset
  }
  return s;
}

void add_common(CLI::App* app, Settings& settings, Common& common, bool model, bool out_required) {
  if (model)
    app->add_option("model", common.model_tokens, "Model name followed by key=value parameters")->expected(0, -1);
  app->add_option("--config", common.config, "Key-value config file; a manifest.txt reproduces its run");
  auto* out = app->add_option("--out", common.out, "Output directory");
  if (out_required) out->required();
  settings.add("workers", common.workers, "Worker threads (0: all cores; ITOLAB_WORKERS caps it)");
}

ModelSpec resolve(const CLI::App& app, const Settings& settings, const Common& common, bool model) {
  std::vector<KeyValue> entries;
  ModelSpec spec;
  try {
    if (!common.config.empty()) entries = parse_key_values(read_file(common.config));
    if (model) {
      std::vector<KeyValue> rest;
      spec = model_spec_from_entries(entries, &rest);
      entries = std::move(rest);
    }
    settings.apply(entries);
  } catch (const ParseError& e) {
    throw ConfigError(common.config + ":" + e.what());
  }
  if (model) {
    if (!common.model_tokens.empty())
      spec = model_spec_from_tokens(common.model_tokens.front(),
                                    {common.model_tokens.begin() + 1, common.model_tokens.end()});
    if (spec.name.empty()) throw CLI::RequiredError(app.get_name() + ": a model is required");
  }
  return spec;
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand, const ModelSpec* model,
                    const Settings& settings, const std::string& extra) {
  std::filesystem::create_directories(dir);
  std::string s = "# itolab run manifest; `itolab " + subcommand + " --config manifest.txt --out DIR` reruns it\n";
  s += "subcommand = " + subcommand + "\n";
  s += "tool_version = " ITOLAB_VERSION "\n";
  s += "timestamp = " + utc_timestamp() + "\n";
  s += "output = " + std::filesystem::absolute(dir).string() + "\n";
  if (model) s += to_text(*model);
  s += settings.text();
  s += extra;
  write_file_atomic(dir / "manifest.txt", s);
}

std::pair<double, double> parse_interval(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw std::invalid_argument("expected lo:hi, got '" + text + "'");
  const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
  if (!(lo < hi)) throw std::invalid_argument("empty interval '" + text + "'");
  return {lo, hi};
}

std::vector<double> parse_grid(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument("expected lo:hi:n, got '" + text + "'");
  const auto [lo, hi] = parse_interval(parts[0] + ":" + parts[1]);
  const double n = parse_double(parts[2]);
  if (n < 2 || n != std::floor(n) || n > 1e7) throw std::invalid_argument("grid size must be an integer >= 2");
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  x.back() = hi;
  return x;
}

std::vector<Rational> parse_rational_list(const std::string& text) {
  std::vector<Rational> out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw std::invalid_argument("expected lo:hi:step, got '" + text + "'");
    const Rational lo = parse_rational(parts[0]), hi = parse_rational(parts[1]), step = parse_rational(parts[2]);
    if (step <= 0 || hi < lo) throw std::invalid_argument("bad range '" + text + "'");
    for (Rational v = lo; v <= hi; v += step) {
      v.canonicalize();
      out.push_back(v);
    }
  } else {
    for (const auto& part : split(text, ',')) out.push_back(parse_rational(part));
  }
  if (out.empty()) throw std::invalid_argument("empty list '" + text + "'");
  return out;
}

}  // namespace itolab::cli
