#include "sbr/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "sbr/errors.hpp"

namespace sbr {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty())
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(text) + "'");
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, std::string_view value) {
  std::filesystem::path p{std::string(value)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

template <class T, class Parse>
std::vector<T> parse_list(std::string_view key, std::string_view value, Parse parse) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) {
    const auto parsed = parse(item);
    if (!parsed)
      throw ConfigError(std::string(key) + ": unknown value '" + item + "'");
    out.push_back(*parsed);
  }
  if (out.empty()) throw ConfigError(std::string(key) + ": list must not be empty");
  return out;
}

}  // namespace

std::vector<std::string> split_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto comma = value.find(',', start);
    const auto item = trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void RunConfig::set(std::string_view key, std::string_view value, const std::filesystem::path& base) {
  const std::string k(key);
  if (key == "corpus") {
    corpus = resolve(base, value);
  } else if (key == "content") {
    contents = parse_list<ContentVariant>(key, value, parse_content_variant);
  } else if (key == "scheme") {
    schemes = parse_list<FeatureScheme>(key, value, parse_feature_scheme);
  } else if (key == "algorithm") {
    algorithms = parse_list<AlgorithmKind>(key, value, parse_algorithm);
  } else if (key == "vector_size") {
    vector_sizes.clear();
    for (const auto& item : split_list(value))
      vector_sizes.push_back(parse_number<std::size_t>(key, item));
    if (vector_sizes.empty()) throw ConfigError("vector_size: list must not be empty");
  } else if (key == "folds") {
    folds = parse_number<int>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "policy") {
    const auto p = parse_ranking_policy(value);
    if (!p) throw ConfigError("policy: unknown value '" + std::string(value) + "'");
    policy = *p;
  } else if (key == "out") {
    out = resolve(base, value);
  } else if (key == "stoplist") {
    stoplist = resolve(base, value);
  } else if (key == "jobs") {
    jobs = parse_number<int>(key, value);
  } else if (key == "timing") {
    timing = parse_bool(key, value);
  } else if (const auto dot = key.find('.'); dot != std::string_view::npos) {
    const auto kind = parse_algorithm(key.substr(0, dot));
    if (!kind) throw ConfigError(k + ": unknown algorithm '" + std::string(key.substr(0, dot)) + "'");
    const std::string name(key.substr(dot + 1));
    // fail early on names or values the kind rejects
    try {
      auto probe = AlgorithmSpec::defaults(*kind);
      probe.set(name, value);
      probe.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(k + ": " + e.what());
    }
    overrides.emplace_back(*kind, name, std::string(value));
  } else {
    throw ConfigError("unknown config key '" + k + "'");
  }
}

std::vector<AlgorithmSpec> RunConfig::algorithm_specs(std::uint64_t s) const {
  std::vector<AlgorithmSpec> specs;
  for (auto kind : algorithms) {
    auto spec = AlgorithmSpec::defaults(kind, s);
    for (const auto& [k, name, value] : overrides)
      if (k == kind) spec.set(name, value);
    spec.validate();
    specs.push_back(spec);
  }
  return specs;
}

void RunConfig::validate() const {
  if (corpus.empty()) throw ConfigError("corpus: no corpus path given");
  if (contents.empty()) throw ConfigError("content: list must not be empty");
  if (schemes.empty()) throw ConfigError("scheme: list must not be empty");
  if (algorithms.empty()) throw ConfigError("algorithm: list must not be empty");
  if (vector_sizes.empty()) throw ConfigError("vector_size: list must not be empty");
  for (auto s : vector_sizes)
    if (s < 1) throw ConfigError("vector_size: sizes must be at least 1");
  if (folds < 2) throw ConfigError("folds: must be at least 2");
  if (jobs < 1) throw ConfigError("jobs: must be at least 1");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base) {
  RunConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view(line);
    // '#' inside a quoted value is kept
    bool quoted = false;
    for (std::size_t i = 0; i < view.size(); ++i) {
      if (view[i] == '"') quoted = !quoted;
      if (view[i] == '#' && !quoted) {
        view = view.substr(0, i);
        break;
      }
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(view.substr(0, eq));
    auto value = trim(view.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": missing key");
    config.set(key, value, base);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> configured) {
  if (configured) return *configured;
  if (const char* env = std::getenv("SBR_SEED"); env && *env)
    return parse_number<std::uint64_t>("SBR_SEED", env);
  return 0;
}

}  // namespace sbr
