#include "itolab/model_spec.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "itolab/error.hpp"

namespace itolab {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

Rational parse_value(const KeyValue& kv) {
  try {
    return parse_rational(kv.value);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("invalid number for '") + kv.key + "': " + e.what(), kv.line, kv.value_column);
  }
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text) {
  std::vector<KeyValue> out;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::size_t i = 0;
    while (i < line.size() && is_space(line[i])) ++i;
    if (i < line.size()) {
      const std::size_t eq = line.find('=', i);
      if (eq == std::string_view::npos)
        throw ParseError("expected 'key = value'", line_no, static_cast<int>(i) + 1);
      std::size_t key_end = eq;
      while (key_end > i && is_space(line[key_end - 1])) --key_end;
      const std::string_view key = line.substr(i, key_end - i);
      if (!valid_key(key)) throw ParseError("invalid key '" + std::string(key) + "'", line_no, static_cast<int>(i) + 1);
      std::size_t v = eq + 1;
      while (v < line.size() && is_space(line[v])) ++v;
      std::size_t v_end = line.size();
      while (v_end > v && is_space(line[v_end - 1])) --v_end;
      if (v == v_end) throw ParseError("missing value for '" + std::string(key) + "'", line_no, static_cast<int>(eq) + 2);
      out.push_back(KeyValue{std::string(key), std::string(line.substr(v, v_end - v)), line_no,
                             static_cast<int>(i) + 1, static_cast<int>(v) + 1});
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

ModelSpec model_spec_from_entries(const std::vector<KeyValue>& entries, std::vector<KeyValue>* rest) {
  ModelSpec spec;
  for (const auto& kv : entries) {
    if (kv.key == "model") {
      spec.name = kv.value;
    } else if (kv.key == "n" || kv.key == "exponent") {
      const Rational n = parse_value(kv);
      if (n.get_den() != 1 || n < 1)
        throw ParseError("exponent must be a positive integer", kv.line, kv.value_column);
      spec.params.exponent = static_cast<int>(n.get_num().get_si());
    } else if (kv.key == "sigma") {
      if (kv.value == "sym" || kv.value == "symbolic") {
        spec.params.sigma.reset();
      } else {
        const Rational s = parse_value(kv);
        if (s <= 0) throw ParseError("sigma must be positive", kv.line, kv.value_column);
        spec.params.sigma = s;
      }
    } else if (kv.key == "a") {
      spec.params.a = parse_value(kv);
    } else if (kv.key == "b") {
      spec.params.b = parse_value(kv);
    } else if (rest != nullptr) {
      rest->push_back(kv);
    } else {
      throw ParseError("unknown key '" + kv.key + "'", kv.line, kv.column);
    }
  }
  return spec;
}

ModelSpec parse_model_spec(std::string_view text) {
  const auto entries = parse_key_values(text);
  ModelSpec spec = model_spec_from_entries(entries);
  if (spec.name.empty()) throw ParseError("missing 'model' key", 1, 1);
  return spec;
}

ModelSpec model_spec_from_tokens(const std::string& name, const std::vector<std::string>& tokens) {
  std::vector<KeyValue> entries;
  int column = static_cast<int>(name.size()) + 2;
  for (const auto& token : tokens) {
    const auto eq = token.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == token.size())
      throw ParseError("expected key=value, got '" + token + "'", 1, column);
    entries.push_back(KeyValue{token.substr(0, eq), token.substr(eq + 1), 1, column, column + static_cast<int>(eq) + 1});
    column += static_cast<int>(token.size()) + 1;
  }
  ModelSpec spec = model_spec_from_entries(entries);
  spec.name = name;
  return spec;
}

NoiseExpansion build_model(const ModelSpec& spec) { return model_zoo(spec.name, spec.params); }

std::string to_text(const ModelSpec& spec) {
  std::ostringstream os;
  os << "model = " << spec.name << "\n";
  if (spec.name == "power_attractor") os << "n = " << spec.params.exponent << "\n";
  if (spec.name == "ou") {
    os << "a = " << spec.params.a.get_str() << "\n";
    os << "b = " << spec.params.b.get_str() << "\n";
  } else {
    os << "sigma = " << (spec.params.sigma ? spec.params.sigma->get_str() : std::string("sym")) << "\n";
  }
  return os.str();
}

}  // namespace itolab
