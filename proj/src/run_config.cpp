#include "hlob/run_config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "hlob/errors.hpp"

namespace hlob {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  try {
    std::size_t used = 0;
    const std::string text(v);
    const double d = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return d;
  } catch (const std::exception&) {
    throw std::invalid_argument(fmt::format("{}: expected a number, got '{}'", key, v));
  }
}

template <typename Int>
Int to_int(std::string_view key, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw std::invalid_argument(fmt::format("{}: expected an integer, got '{}'", key, v));
  return out;
}

void set_kernel(std::optional<ExponentialKernel>& k, bool alpha, std::string_view key,
                std::string_view v) {
  if (alpha && v == "none") {
    k.reset();
    return;
  }
  if (!k) k = ExponentialKernel{0.0, 1.0};
  (alpha ? k->alpha : k->beta) = to_double(key, v);
}

using Entries = std::vector<std::pair<std::string, std::string>>;

struct ParsedFile {
  Entries top;
  std::map<std::string, Entries> sections;
};

ParsedFile parse_file(std::istream& is) {
  ParsedFile f;
  Entries* current = &f.top;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view s = trim(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw DataError("unterminated section header", lineno);
      current = &f.sections[std::string(trim(s.substr(1, s.size() - 2)))];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw DataError("expected 'key = value'", lineno);
    current->emplace_back(std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))));
  }
  return f;
}

}  // namespace

RunConfig RunConfig::preset(Variant v) {
  RunConfig c;
  c.variant = std::string(variant_name(v));
  c.sim.spec = preset_spec(v);
  return c;
}

void RunConfig::set(std::string_view key, std::string_view v) {
  auto& s = sim.spec;
  auto& a = sim.agents;
  if (key == "preset" || key == "variant") {
    const Variant parsed = parse_variant(v);
    variant = std::string(variant_name(parsed));
    s = preset_spec(parsed);
  } else if (key == "mu0") s.mu0 = to_double(key, v);
  else if (key == "lambda0") s.lambda0 = to_double(key, v);
  else if (key == "alpha_mm") set_kernel(s.kernel_mm, true, key, v);
  else if (key == "beta_mm") set_kernel(s.kernel_mm, false, key, v);
  else if (key == "alpha_lm") set_kernel(s.kernel_lm, true, key, v);
  else if (key == "beta_lm") set_kernel(s.kernel_lm, false, key, v);
  else if (key == "alpha_ll") set_kernel(s.kernel_ll, true, key, v);
  else if (key == "beta_ll") set_kernel(s.kernel_ll, false, key, v);
  else if (key == "m_p1") a.m_p1 = to_double(key, v);
  else if (key == "nu_p1") a.nu_p1 = to_double(key, v);
  else if (key == "s_p1") a.s_p1 = to_double(key, v);
  else if (key == "m_v1") a.m_v1 = to_double(key, v);
  else if (key == "m_v2") a.m_v2 = to_double(key, v);
  else if (key == "lambda_c") a.lambda_c = to_double(key, v);
  else if (key == "delta") a.delta = to_double(key, v);
  else if (key == "cancellation") {
    if (v == "thinning") a.cancellation = CancellationRule::IndependentThinning;
    else if (v == "single") a.cancellation = CancellationRule::SingleRandomOrder;
    else throw std::invalid_argument(fmt::format("cancellation: expected thinning or single, got '{}'", v));
  } else if (key == "horizon") sim.horizon = to_double(key, v);
  else if (key == "warmup") sim.warmup = to_double(key, v);
  else if (key == "seed") sim.seed = to_int<std::uint64_t>(key, v);
  else if (key == "initial_mid") sim.initial_mid = to_int<Price>(key, v);
  else if (key == "seed_levels") sim.seed_levels = to_int<int>(key, v);
  else if (key == "out") out = std::string(v);
  else throw std::invalid_argument(fmt::format("unknown config key '{}'", key));
}

RunConfig load_config(std::istream& is, std::optional<Variant> preset) {
  const ParsedFile f = parse_file(is);
  std::optional<Variant> chosen = preset;
  if (!chosen)
    for (const auto& [k, v] : f.top)
      if (k == "preset" || k == "variant") chosen = parse_variant(v);
  RunConfig c = RunConfig::preset(chosen.value_or(Variant::HP));
  for (const auto& [k, v] : f.top)
    if (k != "preset" && k != "variant") c.set(k, v);
  for (const auto& [name, entries] : f.sections) {
    if (name == "result") continue;
    const Variant section_variant = parse_variant(name);
    if (variant_name(section_variant) != c.variant) continue;
    for (const auto& [k, v] : entries) {
      if (k == "preset" || k == "variant") throw std::invalid_argument("preset key inside a section");
      c.set(k, v);
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, std::optional<Variant> preset) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open config '{}'", path.string()));
  return load_config(in, preset);
}

void write_config(std::ostream& os, const RunConfig& c) {
  const auto& s = c.sim.spec;
  const auto& a = c.sim.agents;
  auto kernel = [&](const char* name, const std::optional<ExponentialKernel>& k) {
    if (k)
      os << fmt::format("alpha_{0} = {1}\nbeta_{0} = {2}\n", name, k->alpha, k->beta);
    else
      os << fmt::format("alpha_{} = none\n", name);
  };
  os << "preset = " << c.variant << '\n';
  os << fmt::format("mu0 = {}\nlambda0 = {}\n", s.mu0, s.lambda0);
  kernel("mm", s.kernel_mm);
  kernel("lm", s.kernel_lm);
  kernel("ll", s.kernel_ll);
  os << fmt::format("m_p1 = {}\nnu_p1 = {}\ns_p1 = {}\nm_v1 = {}\nm_v2 = {}\n", a.m_p1, a.nu_p1,
                    a.s_p1, a.m_v1, a.m_v2);
  os << fmt::format("lambda_c = {}\ndelta = {}\ncancellation = {}\n", a.lambda_c, a.delta,
                    a.cancellation == CancellationRule::IndependentThinning ? "thinning" : "single");
  os << fmt::format("horizon = {}\nwarmup = {}\nseed = {}\ninitial_mid = {}\nseed_levels = {}\n",
                    c.sim.horizon, c.sim.warmup, c.sim.seed, c.sim.initial_mid, c.sim.seed_levels);
}

}  // namespace hlob
