#include "amle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string_view>

#include "amle/errors.hpp"

namespace amle {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_integer(std::string_view text, const std::string& what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw InputError(what + ": expected an integer, got '" + std::string(text) + "'");
  return value;
}

double parse_real(std::string_view text, const std::string& what) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty() ||
      !std::isfinite(value))
    throw InputError(what + ": expected a real number, got '" + std::string(text) + "'");
  return value;
}

bool parse_bool(std::string_view text, const std::string& what) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw InputError(what + ": expected true/false, got '" + std::string(text) + "'");
}

}  // namespace

std::optional<int> parse_df_mode(const std::string& text) {
  const std::string_view t = trim(text);
  if (t == "auto-rank" || t == "auto") return std::nullopt;
  if (t.starts_with("fixed:")) {
    const int df = parse_integer<int>(t.substr(6), "df_mode");
    if (df <= 0) throw InputError("df_mode: degrees of freedom must be positive");
    return df;
  }
  throw InputError("df_mode: expected 'auto-rank' or 'fixed:r', got '" + std::string(t) + "'");
}

std::vector<unsigned> parse_level_list(const std::string& text) {
  std::vector<unsigned> out;
  std::string_view rest = text;
  while (true) {
    const auto comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    if (item.empty()) throw InputError("level list: empty entry in '" + text + "'");
    if (const auto dots = item.find(".."); dots != std::string_view::npos) {
      const auto lo = parse_integer<unsigned>(item.substr(0, dots), "level list");
      const auto hi = parse_integer<unsigned>(item.substr(dots + 2), "level list");
      if (hi < lo) throw InputError("level list: empty range '" + std::string(item) + "'");
      for (unsigned v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_integer<unsigned>(item, "level list"));
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (model.empty()) throw InputError("config: model name is empty");
  if (!(T > 0.0)) throw InputError("config: T must be positive");
  if (l < 1 || l > 30) throw InputError("config: l must lie in [1, 30]");
  if (k_list.empty()) throw InputError("config: k_list is empty");
  for (unsigned k : k_list)
    if (k < 1 || k > l)
      throw InputError("config: level k = " + std::to_string(k) + " outside [1, l = " +
                       std::to_string(l) + "]");
  if (M < 1) throw InputError("config: M must be at least 1");
  if (!(p_tail > 0.0 && p_tail < 1.0)) throw InputError("config: p_tail must lie in (0, 1)");
  if (fixed_df && *fixed_df <= 0) throw InputError("config: fixed df must be positive");
}

std::string ExperimentConfig::df_mode() const {
  return fixed_df ? "fixed:" + std::to_string(*fixed_df) : "auto-rank";
}

std::vector<unsigned> ExperimentConfig::levels() const {
  std::vector<unsigned> out = k_list;
  if (sanity_row && std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
  return out;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key(trim(view.substr(0, eq)));
    const std::string value(trim(view.substr(eq + 1)));
    if (key.empty()) throw ParseError("empty key", line_no);
    try {
      if (key == "model")
        cfg.model = value;
      else if (key == "T")
        cfg.T = parse_real(value, key);
      else if (key == "l")
        cfg.l = parse_integer<unsigned>(value, key);
      else if (key == "k_list" || key == "k")
        cfg.k_list = parse_level_list(value);
      else if (key == "p_tail" || key == "p")
        cfg.p_tail = parse_real(value, key);
      else if (key == "M" || key == "m")
        cfg.M = parse_integer<std::size_t>(value, key);
      else if (key == "master_seed" || key == "seed")
        cfg.master_seed = parse_integer<std::uint64_t>(value, key);
      else if (key == "df_mode")
        cfg.fixed_df = parse_df_mode(value);
      else if (key == "output")
        cfg.output = value;
      else if (key == "threads")
        cfg.threads = parse_integer<unsigned>(value, key);
      else if (key == "sanity_row")
        cfg.sanity_row = parse_bool(value, key);
      else
        cfg.model_params[key] = parse_real(value, key);
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open config '" + file.string() + "'");
  return parse_config(in);
}

}  // namespace amle
