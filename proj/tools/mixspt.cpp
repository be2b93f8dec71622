// Copyright 2026 mixspt Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment runner. Each subcommand reads a JSON config (flags override any field), runs its
// sweep on a worker pool and writes <command>.csv plus a <command>.json summary.
// Exit codes: 0 ok, 2 configuration error, 3 failed consistency check.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixspt/decoders.hpp"
#include "mixspt/protocol.hpp"
#include "mixspt/selftest.hpp"
#include "mixspt/statmech.hpp"
#include "mixspt/strange.hpp"
#include "mixspt/version.hpp"
#include "mixspt/virtual.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mixspt;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& what) : std::runtime_error(path + ": " + what) {}
};

// ---------------------------------------------------------------------------
// Output formatting

// 12 significant digits; values strictly inside (0, 1) never print as 0 or 1.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  if (v > 0 && v < 1) {
    double back = std::strtod(buf, nullptr);
    if (back == 0 || back == 1) std::snprintf(buf, sizeof buf, "%.17g", v);
  }
  return buf;
}

json rounded(const json& j) {
  if (j.is_number_float()) {
    double v = j.get<double>();
    if (!std::isfinite(v)) return fmt(v);
    return std::strtod(fmt(v).c_str(), nullptr);
  }
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto it = out.begin(); it != out.end(); ++it) *it = rounded(*it);
    return out;
  }
  return j;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

struct Cell {
  std::string text;
  Cell(double v) : text(fmt(v)) {}
  Cell(std::size_t v) : text(std::to_string(v)) {}
  Cell(int v) : text(std::to_string(v)) {}
  Cell(bool v) : text(v ? "true" : "false") {}
  Cell(const char* s) : text(s) {}
  Cell(std::string s) : text(std::move(s)) {}
};

class Table {
 public:
  Table(std::string name, std::vector<std::string> columns) : name_(std::move(name)), columns_(std::move(columns)) {}
  void add(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw std::logic_error("row width differs from header in " + name_);
    std::vector<std::string> r;
    for (auto& c : row) r.push_back(std::move(c.text));
    rows_.push_back(std::move(r));
  }
  const std::string& name() const { return name_; }
  // Every row leads with (version, seed, config_hash).
  void write(const fs::path& path, std::uint64_t seed, const std::string& hash) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << "version,seed,config_hash";
    for (const auto& c : columns_) os << ',' << c;
    os << '\n';
    for (const auto& r : rows_) {
      os << kVersion << ',' << seed << ',' << hash;
      for (const auto& c : r) os << ',' << csv_escape(c);
      os << '\n';
    }
  }

 private:
  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Config schema

enum class FieldType { integer, number, string, boolean, integer_list, number_list, string_list, channel, channel_list };

struct Field {
  Field(std::string n, FieldType t, json d, std::string h, double l = -kInf, double u = kInf,
        std::vector<std::string> c = {})
      : name(std::move(n)), type(t), def(std::move(d)), help(std::move(h)), lo(l), hi(u), choices(std::move(c)) {}
  std::string name;
  FieldType type;
  json def;
  std::string help;
  double lo = -kInf, hi = kInf;
  std::vector<std::string> choices;
};

const char* json_type(FieldType t) {
  switch (t) {
    case FieldType::integer: return "integer";
    case FieldType::number: return "number";
    case FieldType::string: return "string";
    case FieldType::boolean: return "boolean";
    case FieldType::channel: return "object";
    default: return "array";
  }
}

json channel_schema() {
  std::vector<std::string> kinds, masks;
  for (auto k : {ChannelKind::z_dephase, ChannelKind::y_dephase, ChannelKind::swap, ChannelKind::controlled_hadamard,
                 ChannelKind::sdc})
    kinds.push_back(to_string(k));
  for (auto m : {SublatticeMask::a, SublatticeMask::b, SublatticeMask::both}) masks.push_back(to_string(m));
  return {{"type", "object"},
          {"required", {"kind"}},
          {"additionalProperties", false},
          {"properties",
           {{"kind", {{"enum", kinds}}},
            {"p_a", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
            {"p_b", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
            {"theta", {{"type", "number"}, {"minimum", 0}, {"maximum", M_PI / 2}}},
            {"phi", {{"type", "number"}}},
            {"q", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}},
            {"mask", {{"enum", masks}}}}}};
}

json field_schema(const Field& f) {
  json s = {{"description", f.help}, {"default", f.def}};
  auto bounds = [&](json& t) {
    if (std::isfinite(f.lo)) t["minimum"] = f.lo;
    if (std::isfinite(f.hi)) t["maximum"] = f.hi;
  };
  switch (f.type) {
    case FieldType::integer:
    case FieldType::number:
      s["type"] = json_type(f.type);
      bounds(s);
      break;
    case FieldType::string:
      s["type"] = "string";
      if (!f.choices.empty()) s["enum"] = f.choices;
      break;
    case FieldType::boolean: s["type"] = "boolean"; break;
    case FieldType::integer_list:
    case FieldType::number_list: {
      json item = {{"type", f.type == FieldType::integer_list ? "integer" : "number"}};
      bounds(item);
      s["type"] = "array";
      s["items"] = item;
      break;
    }
    case FieldType::string_list:
      s["type"] = "array";
      s["items"] = {{"type", "string"}};
      if (!f.choices.empty()) s["items"]["enum"] = f.choices;
      break;
    case FieldType::channel: s.update(channel_schema()); break;
    case FieldType::channel_list:
      s["type"] = "array";
      s["items"] = channel_schema();
      break;
  }
  return s;
}

void validate_number(const json& v, const Field& f, const std::string& path, bool integer) {
  if (integer ? !v.is_number_integer() : !v.is_number()) throw ConfigError(path, std::string("expected ") + (integer ? "integer" : "number"));
  double x = v.get<double>();
  if (integer && v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0 && f.lo >= 0)
    throw ConfigError(path, "must be non-negative");
  if (x < f.lo || x > f.hi) throw ConfigError(path, "must lie in [" + fmt(f.lo) + ", " + fmt(f.hi) + "]");
}

ChannelSpec parse_channel(const json& v, const std::string& path) {
  if (!v.is_object()) throw ConfigError(path, "expected a channel object");
  for (auto it = v.begin(); it != v.end(); ++it)
    if (!channel_schema()["properties"].contains(it.key())) throw ConfigError(path + "/" + it.key(), "unknown channel field");
  try {
    return v.get<ChannelSpec>();
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

void validate_field(const json& v, const Field& f) {
  const std::string path = "/" + f.name;
  switch (f.type) {
    case FieldType::integer: validate_number(v, f, path, true); break;
    case FieldType::number: validate_number(v, f, path, false); break;
    case FieldType::string:
      if (!v.is_string()) throw ConfigError(path, "expected string");
      if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end())
        throw ConfigError(path, "unknown choice '" + v.get<std::string>() + "'");
      break;
    case FieldType::boolean:
      if (!v.is_boolean()) throw ConfigError(path, "expected boolean");
      break;
    case FieldType::integer_list:
    case FieldType::number_list:
    case FieldType::string_list:
    case FieldType::channel_list:
      if (!v.is_array()) throw ConfigError(path, "expected array");
      for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string p = path + "/" + std::to_string(k);
        if (f.type == FieldType::integer_list) validate_number(v[k], f, p, true);
        else if (f.type == FieldType::number_list) validate_number(v[k], f, p, false);
        else if (f.type == FieldType::channel_list) parse_channel(v[k], p);
        else if (!v[k].is_string()) throw ConfigError(p, "expected string");
        else if (!f.choices.empty() && std::find(f.choices.begin(), f.choices.end(), v[k].get<std::string>()) == f.choices.end())
          throw ConfigError(p, "unknown choice '" + v[k].get<std::string>() + "'");
      }
      break;
    case FieldType::channel: parse_channel(v, path); break;
  }
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

json parse_scalar(const std::string& text, FieldType t, const std::string& path) {
  try {
    if (t == FieldType::string) return text;
    json v = json::parse(text);
    return v;
  } catch (const json::parse_error&) {
    if (t == FieldType::string_list) return text;
    throw ConfigError(path, "cannot parse '" + text + "'");
  }
}

// Flag text to JSON: lists take JSON arrays or comma-separated items; a channel takes a JSON
// object or a bare kind that replaces the kind of the configured channel.
json parse_flag(const std::string& text, const Field& f, const json& current) {
  const std::string path = "/" + f.name;
  switch (f.type) {
    case FieldType::integer:
    case FieldType::number:
    case FieldType::boolean: return parse_scalar(text, f.type, path);
    case FieldType::string: return text;
    case FieldType::channel: {
      if (!text.empty() && text.front() == '{') return parse_scalar(text, f.type, path);
      json c = current.is_object() ? current : json::object();
      c["kind"] = text;
      return c;
    }
    case FieldType::channel_list: return parse_scalar(text, f.type, path);
    default: {
      if (!text.empty() && text.front() == '[') return parse_scalar(text, f.type, path);
      json arr = json::array();
      for (const auto& item : split_commas(text))
        arr.push_back(f.type == FieldType::string_list ? json(item) : parse_scalar(item, f.type, path));
      return arr;
    }
  }
}

// ---------------------------------------------------------------------------
// Run context and worker pool

struct Context {
  std::string command;
  json cfg;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  fs::path out;
  std::string hash;
  std::vector<Table> tables;
  json results = json::array();
  json extra = json::object();
  std::vector<std::string> failures;

  void fail(const std::string& what) { failures.push_back(what); }
  std::uint64_t task_seed(std::size_t k) const { return Rng(seed).split(k).next(); }
  template <class T>
  T get(const std::string& key) const {
    return cfg.at(key).get<T>();
  }
  ChannelSpec channel(const std::string& key = "channel") const { return cfg.at(key).get<ChannelSpec>(); }
};

// Results land in task order whatever the worker count.
template <class F>
auto parallel_map(std::size_t n, std::size_t workers, F f) -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        slots[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < std::min(workers, n); ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

std::string channel_label(const ChannelSpec& c) {
  std::ostringstream os;
  os << to_string(c.kind);
  if (c.is_dephasing()) os << "(p_a=" << fmt(c.p_a) << ";p_b=" << fmt(c.p_b) << ")";
  else if (c.kind == ChannelKind::swap) os << "(mask=" << to_string(c.mask) << ")";
  else if (c.kind == ChannelKind::controlled_hadamard) os << "(theta=" << fmt(c.theta) << ";mask=" << to_string(c.mask) << ")";
  else os << "(theta=" << fmt(c.theta) << ";phi=" << fmt(c.phi) << ";q=" << fmt(c.q) << ";mask=" << to_string(c.mask) << ")";
  return os.str();
}

double z_score(double value, double ref, double se) {
  if (std::isnan(ref)) return kNaN;
  if (se > 0) return (value - ref) / se;
  return std::abs(value - ref) <= 1e-9 ? 0.0 : kInf;
}

const std::vector<std::string> kIcColumns = {"estimator", "channel", "N", "p_a", "p_b", "value", "stderr",
                                             "n_traj", "closed_form", "z"};

// ---------------------------------------------------------------------------
// Subcommands

void run_ic_1d(Context& ctx) {
  auto Ns = ctx.get<std::vector<std::size_t>>("N");
  auto base = ctx.channel();
  auto grid = ctx.get<std::vector<double>>("p_grid");
  const auto est = ctx.get<std::string>("estimator");
  const auto n_traj = ctx.get<std::size_t>("n_traj");
  if (!grid.empty() && !base.is_dephasing()) throw ConfigError("/p_grid", "strength sweeps need a dephasing channel");
  std::vector<std::pair<std::size_t, ChannelSpec>> tasks;
  for (auto N : Ns) {
    if (grid.empty()) tasks.emplace_back(N, base);
    for (double p : grid) {
      auto s = base;
      s.p_b = p;
      tasks.emplace_back(N, s);
    }
  }
  if (est == "closed_form" || est == "virtual_mc")
    if (base.kind != ChannelKind::z_dephase) throw ConfigError("/estimator", est + " needs z_dephase");
  auto reps = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
    auto [N, spec] = tasks[k];
    const auto seed = ctx.task_seed(k);
    if (est == "closed_form") return coherent_info_closed_form(N, spec);
    if (est == "exact_dense") return coherent_info_no_env_dense(layout_1d(N), spec);
    if (est == "sampled_dense") return coherent_info_no_env_dense(layout_1d(N), spec, n_traj, seed);
    if (est == "decoder_mc") return coherent_info_decoder_1d(N, spec, n_traj, seed);
    return simulate_virtual_1d(N, spec.p_a, spec.p_b, n_traj, seed);
  });
  Table t("ic_1d", kIcColumns);
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto [N, spec] = tasks[k];
    const auto& r = reps[k];
    double closed = spec.kind == ChannelKind::z_dephase ? ic_1d_zdephase_closed(N, spec.p_a, spec.p_b) : kNaN;
    double z = z_score(r.value, closed, r.stderr_);
    bool exact = r.estimator == "exact_dense" || r.estimator == "decoder_mc";
    if (exact && !std::isnan(closed) && std::abs(r.value - closed) > 1e-9)
      ctx.fail("ic-1d " + r.estimator + " N=" + std::to_string(N) + " differs from the closed form");
    t.add({r.estimator, channel_label(spec), N, spec.p_a, spec.p_b, r.value, r.stderr_, r.n_traj, closed, z});
    json row = r;
    row["N"] = N;
    ctx.results.push_back(row);
  }
  ctx.tables.push_back(std::move(t));
}

void run_ic_2d(Context& ctx) {
  auto Lxs = ctx.get<std::vector<std::size_t>>("Lx"), Lys = ctx.get<std::vector<std::size_t>>("Ly");
  auto spec = ctx.channel();
  const auto est = ctx.get<std::string>("estimator");
  const auto n = ctx.get<std::size_t>("n_samples");
  const bool nb = ctx.get<bool>("noisy_boundary");
  if (est == "exact_stabilizer" && (spec.hits(0) || spec.hits(1)))
    throw ConfigError("/channel", "exact_stabilizer evaluates the pure protocol; use a zero-strength dephasing channel");
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (auto lx : Lxs)
    for (auto ly : Lys) tasks.emplace_back(lx, ly);
  auto reps = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
    auto [lx, ly] = tasks[k];
    if (est == "exact_stabilizer") return coherent_info_pure(layout_2d(lx, ly, nb));
    return coherent_info_decoder_2d(lx, ly, spec, n, ctx.task_seed(k), nb);
  });
  Table t("ic_2d", {"estimator", "channel", "Lx", "Ly", "value", "stderr", "n_samples", "failure_rate", "lower_bound"});
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto [lx, ly] = tasks[k];
    const auto& r = reps[k];
    if (r.estimator == "exact_stabilizer" && std::abs(r.value - 1) > 1e-12)
      ctx.fail("pure cylinder " + std::to_string(lx) + "x" + std::to_string(ly) + " does not transmit one bit");
    if (r.value > 1 + 1e-9) ctx.fail("coherent information above one bit");
    double fr = r.extra.contains("failure_rate") ? r.extra["failure_rate"].get<double>() : kNaN;
    t.add({r.estimator, channel_label(spec), lx, ly, r.value, r.stderr_, r.n_traj, fr, r.lower_bound});
    json row = r;
    row["Lx"] = lx;
    row["Ly"] = ly;
    ctx.results.push_back(row);
  }
  ctx.tables.push_back(std::move(t));
}

bool weakly_symmetric_where_applied(const ChannelSpec& spec) {
  bool ok = true;
  for (int s : {0, 1})
    if (spec.hits(s)) ok = ok && is_weakly_symmetric(spec, s);
  return ok;
}

void run_ic_env(Context& ctx) {
  auto Ns = ctx.get<std::vector<std::size_t>>("N");
  auto specs = ctx.cfg.at("channels").get<std::vector<ChannelSpec>>();
  std::vector<std::pair<std::size_t, ChannelSpec>> tasks;
  for (const auto& s : specs)
    for (auto N : Ns) tasks.emplace_back(N, s);
  auto out = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
    auto [N, spec] = tasks[k];
    auto L = layout_1d(N);
    return std::pair{coherent_info_with_env(L, spec), coherent_info_no_env_dense(L, spec)};
  });
  Table t("ic_env", {"channel", "N", "ic_erm", "ic_rm", "weakly_symmetric"});
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto [N, spec] = tasks[k];
    const auto& [erm, rm] = out[k];
    bool weak = weakly_symmetric_where_applied(spec);
    if (rm.value > erm.value + 1e-9) ctx.fail("data processing violated for " + channel_label(spec));
    t.add({channel_label(spec), N, erm.value, rm.value, weak});
    ctx.results.push_back({{"channel", spec}, {"N", N}, {"ic_erm", erm}, {"ic_rm", rm}, {"weakly_symmetric", weak}});
  }
  ctx.tables.push_back(std::move(t));
}

void run_threshold(Context& ctx) {
  auto sizes = ctx.get<std::vector<std::size_t>>("sizes");
  auto grid = ctx.get<std::vector<double>>("p_grid");
  const auto n = ctx.get<std::size_t>("n_samples");
  const auto n_boot = ctx.get<std::size_t>("n_boot");
  const auto obs = ctx.get<std::string>("observable");
  const double lambda = ctx.get<double>("lambda");
  const bool exact = ctx.get<bool>("exact_classes");
  if (sizes.size() < 2) throw ConfigError("/sizes", "need at least two sizes");
  if (grid.size() < 2) throw ConfigError("/p_grid", "need at least two strengths");
  for (auto L : sizes)
    if (L < 3) throw ConfigError("/sizes", "sizes must be at least 3");
  std::sort(sizes.begin(), sizes.end());
  std::sort(grid.begin(), grid.end());
  Table scan("threshold_scan", {"model", "L", "p", "lambda", "observable", "value", "stderr", "n_samples"});
  if (obs == "correlation_ratio") {
    auto res = threshold_scan_points(grid, sizes, n, ctx.seed, lambda, ScanObservable::correlation_ratio);
    for (const auto& p : res.points) scan.add({"rbim_nishimori", p.L, p.p, p.lambda, obs, p.value, p.stderr_, p.n_samples});
    ctx.tables.push_back(std::move(scan));
    try {
      ctx.extra["estimate"] = scan_crossing(res, n_boot, ctx.seed);
    } catch (const NoCrossing& e) {
      ctx.fail(std::string("bracketing failed: ") + e.what());
    }
    return;
  }
  if (lambda != 0) throw ConfigError("/lambda", "the matching decoder has no perturbation; use correlation_ratio");
  std::vector<std::pair<std::size_t, double>> tasks;
  for (auto L : sizes)
    for (double p : grid) tasks.emplace_back(L, p);
  auto stats = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
    auto [L, p] = tasks[k];
    return run_decoder_2d(SyndromeLattice(L, L), ChannelSpec::z_dephase(0, p), n, ctx.task_seed(k), exact);
  });
  Table bench("threshold_benchmark", {"model", "L", "p", "n_samples", "failure_rate", "stderr", "mean_delta"});
  std::vector<ThresholdPoint> pts;
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto [L, p] = tasks[k];
    const auto& st = stats[k];
    double delta = st.exact ? st.delta.mean() : kNaN;
    bench.add({"cluster2d_matching", L, p, n, st.failures.value(), st.failures.stderr_(), delta});
    scan.add({"cluster2d_matching", L, p, 0.0, obs, st.failures.value(), st.failures.stderr_(), n});
    pts.push_back({L, p, n, st.failures.hits});
  }
  ctx.tables.push_back(std::move(bench));
  ctx.tables.push_back(std::move(scan));
  try {
    ctx.extra["estimate"] = estimate_threshold(pts, n_boot, ctx.seed);
  } catch (const NoCrossing& e) {
    ctx.fail(std::string("bracketing failed: ") + e.what());
  }
}

void run_strange(Context& ctx) {
  const auto kind = ctx.get<std::string>("kind");
  const auto geometry = ctx.get<std::string>("geometry");
  const auto L = ctx.get<std::size_t>("L"), Ly = ctx.get<std::size_t>("Ly");
  auto spec = ctx.channel();
  auto seps = ctx.get<std::vector<std::size_t>>("separations");
  const double lambda = ctx.get<double>("lambda");
  const auto n_traj = ctx.get<std::size_t>("n_traj");
  static const std::map<std::string, ScMethod> methods = {{"dense", ScMethod::dense},
                                                          {"stabilizer_sum", ScMethod::stabilizer_sum},
                                                          {"closed_form", ScMethod::closed_form},
                                                          {"ising_map", ScMethod::ising_map}};
  const ScMethod method = methods.at(ctx.get<std::string>("method"));
  const double p = spec.is_dephasing() ? spec.p_b : spec.q;
  Table t("strange", {"kind", "channel", "p", "lambda", "separation", "value", "stderr", "xi_fit"});
  std::vector<double> sep_d, mean_abs;
  std::vector<std::pair<double, double>> rows;

  if (kind == "type_II") {
    if (geometry != "ring1d") throw ConfigError("/geometry", "type_II correlators run on ring1d");
    auto g = ScGeometry::ring_1d(L);
    auto vals = parallel_map(seps.size(), ctx.workers, [&](std::size_t k) {
      if (seps[k] == 0 || seps[k] >= 2 * L) throw ConfigError("/separations", "separation outside the ring");
      return type2_sc(g, spec, 0, seps[k], method).value;
    });
    for (std::size_t k = 0; k < seps.size(); ++k) {
      if (method != ScMethod::closed_form) {
        try {
          double closed = type2_sc(g, spec, 0, seps[k], ScMethod::closed_form).value;
          if (std::abs(closed - vals[k]) > 1e-10) ctx.fail("type-II value differs from its closed form");
        } catch (const UnsupportedClosedForm&) {
        }
      }
      rows.emplace_back(vals[k], 0.0);
    }
  } else {
    if (geometry == "ring1d") throw ConfigError("/geometry", "type_I correlators run on chain1d or cylinder2d");
    if (!spec.is_dephasing()) throw ConfigError("/channel", "type_I trajectories need a dephasing channel");
    if (lambda > 0 && geometry != "cylinder2d") throw ConfigError("/lambda", "the perturbation lives on cylinder2d");
    auto g = geometry == "chain1d" ? ScGeometry::chain_1d(L) : ScGeometry::cylinder_2d(L, Ly);
    LiebCylinder2D lieb(std::max<std::size_t>(L, 2), std::max<std::size_t>(Ly, 1));
    auto sites = [&](std::size_t s) -> std::array<std::size_t, 2> {
      if (geometry == "chain1d") {
        if (2 * s > 2 * L) throw ConfigError("/separations", "separation beyond the chain");
        return {0, 2 * s};
      }
      if (s >= L) throw ConfigError("/separations", "separation beyond the cylinder");
      return {lieb.vertex(0, 0), lieb.vertex(s, 0)};
    };
    for (auto s : seps) sites(s);
    std::vector<std::pair<std::size_t, std::size_t>> tasks;
    for (std::size_t k = 0; k < seps.size(); ++k)
      for (std::size_t tr = 0; tr < n_traj; ++tr) tasks.emplace_back(k, tr);
    auto vals = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
      auto [i, j] = sites(seps[tasks[k].first]);
      Rng rng(ctx.task_seed(k));
      const std::size_t ends[2] = {i, j};
      auto m = sample_trajectory(g, spec, ends, rng);
      if (lambda > 0) return perturbed_type1_sc(g, p, lambda, m, i, j).value;
      return type1_sc(g, spec, m, i, j, method).value;
    });
    for (std::size_t k = 0; k < seps.size(); ++k) {
      Accumulator a;
      for (std::size_t tr = 0; tr < n_traj; ++tr) a.add(std::abs(vals[k * n_traj + tr]));
      rows.emplace_back(a.mean(), a.stderr_of_mean());
    }
  }
  std::optional<DecayFit> fit;
  for (std::size_t k = 0; k < seps.size(); ++k) {
    sep_d.push_back(static_cast<double>(seps[k]));
    mean_abs.push_back(rows[k].first);
  }
  try {
    fit = fit_decay_length(sep_d, mean_abs);
  } catch (const std::exception&) {
  }
  const double xi = fit ? fit->xi : kNaN;
  for (std::size_t k = 0; k < seps.size(); ++k) {
    t.add({kind, channel_label(spec), p, lambda, seps[k], rows[k].first, rows[k].second, xi});
    ctx.results.push_back({{"separation", seps[k]}, {"value", rows[k].first}, {"stderr", rows[k].second}});
  }
  if (fit) ctx.extra["decay"] = *fit;
  ctx.tables.push_back(std::move(t));
}

void run_phase_diagram(Context& ctx) {
  const auto model = ctx.get<std::string>("model");
  auto spec = ctx.channel();
  if (spec.kind != ChannelKind::z_dephase) throw ConfigError("/channel", "phase diagrams are built for z_dephase");
  if (model == "cluster1d") {
    auto pas = ctx.get<std::vector<double>>("p_a_grid"), pbs = ctx.get<std::vector<double>>("p_b_grid");
    const auto N = ctx.get<std::size_t>("N"), dN = ctx.get<std::size_t>("dense_N");
    const bool dense = ctx.get<bool>("dense_check");
    for (const auto* g : {&pas, &pbs})
      for (double p : *g)
        if (p > 0.5) throw ConfigError(g == &pas ? "/p_a_grid" : "/p_b_grid", "strengths lie in [0, 0.5]");
    std::vector<std::pair<double, double>> tasks;
    for (double a : pas)
      for (double b : pbs) tasks.emplace_back(a, b);
    auto dv = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
      if (!dense) return kNaN;
      return coherent_info_no_env_dense(layout_1d(dN), ChannelSpec::z_dephase(tasks[k].first, tasks[k].second)).value;
    });
    Table t("phase_diagram", {"model", "p_a", "p_b", "N", "ic_closed", "region", "dense_N", "ic_dense", "correction"});
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      auto [a, b] = tasks[k];
      double closed = ic_1d_zdephase_closed(N, a, b);
      double region = 1.0 - (a > 0) - (b > 0);
      double corr = 0;
      for (double p : {a, b})
        if (p > 0) corr += charge_capacity(std::pow(1 - 2 * p, static_cast<double>(dN)));
      if (dense) {
        if (std::abs(dv[k] - ic_1d_zdephase_closed(dN, a, b)) > 1e-9) ctx.fail("dense spot check differs from closed form");
        if (std::abs(dv[k] - region) > corr + 1e-9) ctx.fail("dense spot check outside the pre-asymptotic band");
      }
      t.add({model, a, b, N, closed, region, dN, dv[k], corr});
      ctx.results.push_back({{"p_a", a}, {"p_b", b}, {"ic_closed", closed}, {"region", region}, {"ic_dense", dv[k]}});
    }
    ctx.tables.push_back(std::move(t));
    return;
  }
  auto pls = ctx.get<std::vector<double>>("p_l_grid"), pvs = ctx.get<std::vector<double>>("p_v_grid");
  const auto Lx = ctx.get<std::size_t>("Lx"), Ly = ctx.get<std::size_t>("Ly");
  const auto n = ctx.get<std::size_t>("n_samples");
  std::vector<std::pair<double, double>> tasks;
  for (double l : pls)
    for (double v : pvs) tasks.emplace_back(l, v);
  auto reps = parallel_map(pls.size(), ctx.workers, [&](std::size_t k) {
    return coherent_info_decoder_2d(Lx, Ly, ChannelSpec::z_dephase(0, pls[k]), n, ctx.task_seed(k));
  });
  Table t("phase_diagram", {"model", "Lx", "Ly", "p_l", "p_v", "value", "stderr", "vertex_entropy", "line_entropy",
                            "failure_rate", "lower_bound"});
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    auto [l, v] = tasks[k];
    const auto& r = reps[k / pvs.size()];
    double hv = gamma_v_entropy((Lx - 1) * Ly, v);
    double hl = 1.0 - r.value;
    double value = 1.0 - hv - hl;
    t.add({model, Lx, Ly, l, v, value, r.stderr_, hv, hl, r.extra["failure_rate"].get<double>(), r.lower_bound});
    ctx.results.push_back({{"p_l", l}, {"p_v", v}, {"value", value}, {"stderr", r.stderr_}});
  }
  ctx.tables.push_back(std::move(t));
}

void run_virtual(Context& ctx) {
  const auto dim = ctx.get<std::size_t>("dim");
  const auto n = ctx.get<std::size_t>("n_samples");
  if (dim == 1) {
    auto Ns = ctx.get<std::vector<std::size_t>>("N");
    auto spec = ctx.channel();
    if (spec.kind != ChannelKind::z_dephase) throw ConfigError("/channel", "the 1D virtual channel models z_dephase");
    auto reps = parallel_map(Ns.size(), ctx.workers, [&](std::size_t k) {
      return simulate_virtual_1d(Ns[k], spec.p_a, spec.p_b, n, ctx.task_seed(k));
    });
    Table t("virtual", kIcColumns);
    for (std::size_t k = 0; k < Ns.size(); ++k) {
      const auto& r = reps[k];
      double closed = ic_1d_zdephase_closed(Ns[k], spec.p_a, spec.p_b);
      t.add({r.estimator, channel_label(spec), Ns[k], spec.p_a, spec.p_b, r.value, r.stderr_, r.n_traj, closed,
             z_score(r.value, closed, r.stderr_)});
      ctx.results.push_back(r);
    }
    ctx.tables.push_back(std::move(t));
    return;
  }
  auto sizes = ctx.get<std::vector<std::size_t>>("sizes");
  auto grid = ctx.get<std::vector<double>>("p_grid");
  for (double p : grid)
    if (p > 0.5) throw ConfigError("/p_grid", "strengths lie in [0, 0.5]");
  for (auto L : sizes)
    if (L < 3) throw ConfigError("/sizes", "sizes must be at least 3");
  static const std::map<std::string, VirtualNoiseSource> sources = {
      {"native", VirtualNoiseSource::native},
      {"decoder_disorder", VirtualNoiseSource::decoder_disorder},
      {"cluster_state", VirtualNoiseSource::cluster_state}};
  Virtual2DOptions opt;
  opt.p_meas = ctx.get<double>("p_meas");
  opt.source = sources.at(ctx.get<std::string>("source"));
  opt.noisy_boundary = ctx.get<bool>("noisy_boundary");
  if (opt.source != VirtualNoiseSource::native && opt.p_meas >= 0)
    throw ConfigError("/p_meas", "separate measurement strength needs the native source");
  std::vector<std::pair<std::size_t, double>> tasks;
  for (auto L : sizes)
    for (double p : grid) tasks.emplace_back(L, p);
  auto reps = parallel_map(tasks.size(), ctx.workers, [&](std::size_t k) {
    return simulate_virtual_2d(tasks[k].first, tasks[k].first, tasks[k].second, n, ctx.task_seed(k), opt);
  });
  Table t("virtual", {"model", "L", "p", "n_samples", "failure_rate", "stderr", "mean_delta"});
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const auto& r = reps[k];
    t.add({"virtual", tasks[k].first, tasks[k].second, n, r.failures.value(), r.failures.stderr_(), kNaN});
    ctx.results.push_back(r);
  }
  ctx.tables.push_back(std::move(t));
}

void run_selftest_cmd(Context& ctx) {
  auto res = run_selftest(ctx.get<std::vector<std::string>>("suites"));
  Table t("selftest", {"suite", "passed", "checks", "failures", "first_failure"});
  for (const auto& r : res) {
    t.add({r.name, r.passed, r.checks, r.failures, r.first_failure});
    ctx.results.push_back(r);
    if (!r.passed) ctx.fail("suite " + r.name + ": " + r.first_failure);
    std::cerr << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.checks << " checks)\n";
  }
  ctx.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------------------
// Command table

struct Command {
  std::string name, help;
  std::vector<Field> fields;
  std::function<void(Context&)> run;
};

json channel_json(const ChannelSpec& c) { return c; }

std::vector<Command> commands() {
  using F = FieldType;
  using M = SublatticeMask;
  const std::vector<std::string> ic_estimators = {"closed_form", "exact_dense", "sampled_dense", "decoder_mc",
                                                  "virtual_mc"};
  std::vector<std::string> suites;
  for (const auto& s : all_suites()) suites.push_back(s.name);
  return {
      {"ic-1d",
       "I_c(L:RM) of the decohered 1D chain",
       {{"N", F::integer_list, {2, 3, 4}, "unit cells (2N measured sites)", 1, 64},
        {"channel", F::channel, channel_json(ChannelSpec::z_dephase(0, 0.1)), "per-site channel"},
        {"estimator", F::string, "closed_form", "estimator", -kInf, kInf, ic_estimators},
        {"n_traj", F::integer, 2000, "trajectories or samples for sampled estimators", 1},
        {"p_grid", F::number_list, json::array(), "sweep of the sublattice-b strength (dephasing)", 0, 1}},
       run_ic_1d},
      {"ic-2d",
       "I_c(L:RM) on the 2D cylinder",
       {{"Lx", F::integer_list, {3}, "columns", 3, 64},
        {"Ly", F::integer_list, {3, 4}, "ring length", 2, 64},
        {"channel", F::channel, channel_json(ChannelSpec::z_dephase(0, 0.05)), "edge channel"},
        {"estimator", F::string, "decoder_mc", "estimator", -kInf, kInf, {"decoder_mc", "exact_stabilizer"}},
        {"n_samples", F::integer, 2000, "disorder samples", 1},
        {"noisy_boundary", F::boolean, false, "decohere the boundary vertical edges"}},
       run_ic_2d},
      {"ic-env",
       "I_c(L:ERM) and I_c(L:RM) with the environment kept",
       {{"N", F::integer_list, {2, 3}, "unit cells", 1, 4},
        {"channels",
         F::channel_list,
         {channel_json(ChannelSpec::z_dephase(0.1, 0.2)), channel_json(ChannelSpec::y_dephase(0.15, 0.05)),
          channel_json(ChannelSpec::swap(M::both)), channel_json(ChannelSpec::sdc(0.3, 0.2, 1.0, M::both)),
          channel_json(ChannelSpec::controlled_hadamard(M_PI / 2, M::a))},
         "channels to evaluate"}},
       run_ic_env},
      {"threshold",
       "decoder-failure or correlation-ratio crossing on L x L cylinders",
       {{"sizes", F::integer_list, {8, 12, 16}, "linear sizes", 3, 64},
        {"p_grid", F::number_list, {0.06, 0.08, 0.1, 0.12, 0.14, 0.16}, "edge dephasing strengths", 0, 0.5},
        {"n_samples", F::integer, 10000, "samples per point", 1},
        {"n_boot", F::integer, 200, "bootstrap resamples", 0},
        {"observable", F::string, "decoder_failure", "scan observable", -kInf, kInf, {"decoder_failure", "correlation_ratio"}},
        {"lambda", F::number, 0.0, "perturbation strength (correlation_ratio only)", 0},
        {"exact_classes", F::boolean, false, "also compute exact class posteriors (small lattices)"}},
       run_threshold},
      {"strange",
       "type-I / type-II strange correlators against separation",
       {{"kind", F::string, "type_II", "correlator kind", -kInf, kInf, {"type_I", "type_II"}},
        {"geometry", F::string, "ring1d", "state geometry", -kInf, kInf, {"ring1d", "chain1d", "cylinder2d"}},
        {"L", F::integer, 6, "ring cells, chain unit cells or cylinder columns", 2, 64},
        {"Ly", F::integer, 3, "cylinder ring length", 2, 64},
        {"channel", F::channel, channel_json(ChannelSpec::sdc(0.4, 0.3, 0.7, M::a)), "per-site channel"},
        {"method", F::string, "dense", "evaluation method", -kInf, kInf, {"dense", "stabilizer_sum", "closed_form", "ising_map"}},
        {"separations", F::integer_list, {1, 2, 3, 4, 5, 6}, "site separations (type_II), unit cells or columns (type_I)", 0},
        {"lambda", F::number, 0.0, "perturbation of the 2D model", 0},
        {"n_traj", F::integer, 1, "Born trajectories per separation (type_I)", 1}},
       run_strange},
      {"phase-diagram",
       "grids of I_c(L:RM) over decoherence strengths",
       {{"model", F::string, "cluster1d", "model", -kInf, kInf, {"cluster1d", "cylinder2d"}},
        {"channel", F::channel, channel_json(ChannelSpec::z_dephase(0, 0)), "channel kind (z_dephase)"},
        {"p_a_grid", F::number_list, {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}, "sublattice-a strengths", 0, 1},
        {"p_b_grid", F::number_list, {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5}, "sublattice-b strengths", 0, 1},
        {"N", F::integer, 50, "closed-form unit cells", 1},
        {"dense_check", F::boolean, true, "exact dense spot checks"},
        {"dense_N", F::integer, 3, "unit cells of the dense spot checks", 1, 4},
        {"p_l_grid", F::number_list, {0.0, 0.05, 0.1, 0.15, 0.2}, "edge strengths (cylinder2d)", 0, 0.5},
        {"p_v_grid", F::number_list, {0.0, 0.05, 0.1}, "vertex strengths (cylinder2d)", 0, 0.5},
        {"Lx", F::integer, 4, "cylinder columns", 3, 64},
        {"Ly", F::integer, 4, "cylinder ring length", 2, 64},
        {"n_samples", F::integer, 2000, "disorder samples (cylinder2d)", 1}},
       run_phase_diagram},
      {"virtual",
       "virtual-time evolution estimators",
       {{"dim", F::integer, 1, "1: teleported qubit, 2: foliated repetition code", 1, 2},
        {"N", F::integer_list, {2, 4, 10}, "unit cells (dim 1)", 1, 4096},
        {"channel", F::channel, channel_json(ChannelSpec::z_dephase(0, 0.1)), "site channel (dim 1)"},
        {"n_samples", F::integer, 20000, "samples per point", 1},
        {"sizes", F::integer_list, {4, 6, 8}, "L x L cylinders (dim 2)", 3, 64},
        {"p_grid", F::number_list, {0.04, 0.08, 0.12}, "data and measurement strengths (dim 2)", 0, 0.5},
        {"p_meas", F::number, -1.0, "separate measurement strength; negative = equal (dim 2, native)", -1, 0.5},
        {"source", F::string, "native", "noise source (dim 2)", -kInf, kInf, {"native", "decoder_disorder", "cluster_state"}},
        {"noisy_boundary", F::boolean, false, "noisy first and last rounds (dim 2)"}},
       run_virtual},
      {"selftest",
       "invariant suites",
       {{"suites", F::string_list, json::array(), "suites to run (all when empty)", -kInf, kInf, suites}},
       run_selftest_cmd},
  };
}

json command_schema(const Command& c) {
  json props = {{"command", {{"const", c.name}}},
                {"seed", {{"type", "integer"}, {"minimum", 0}}},
                {"workers", {{"type", "integer"}, {"minimum", 1}}}};
  for (const auto& f : c.fields) props[f.name] = field_schema(f);
  return {{"$schema", "https://json-schema.org/draft/2020-12/schema"},
          {"title", "mixspt " + c.name + " configuration"},
          {"description", c.help},
          {"type", "object"},
          {"additionalProperties", false},
          {"properties", props}};
}

struct Invocation {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out = "mixspt-out";
  std::map<std::string, std::string> flags;
};

Context build_context(const Command& c, const Invocation& inv) {
  Context ctx;
  ctx.command = c.name;
  json cfg = json::object();
  for (const auto& f : c.fields) cfg[f.name] = f.def;
  json file = json::object();
  if (!inv.config_path.empty()) {
    std::ifstream is(inv.config_path);
    if (!is) throw ConfigError(inv.config_path, "cannot open config file");
    try {
      file = json::parse(is);
    } catch (const json::parse_error& e) {
      throw ConfigError(inv.config_path, e.what());
    }
    if (!file.is_object()) throw ConfigError("/", "config must be a JSON object");
  }
  std::uint64_t seed = 1;
  std::size_t workers = 1;
  for (auto it = file.begin(); it != file.end(); ++it) {
    const std::string& k = it.key();
    if (k == "command") {
      if (it.value() != c.name) throw ConfigError("/command", "config is for '" + it.value().dump() + "'");
    } else if (k == "seed") {
      if (!it.value().is_number_unsigned()) throw ConfigError("/seed", "expected non-negative integer");
      seed = it.value().get<std::uint64_t>();
    } else if (k == "workers") {
      if (!it.value().is_number_unsigned() || it.value().get<std::size_t>() == 0)
        throw ConfigError("/workers", "expected positive integer");
      workers = it.value().get<std::size_t>();
    } else if (cfg.contains(k)) {
      cfg[k] = it.value();
    } else {
      throw ConfigError("/" + k, "unknown field for " + c.name);
    }
  }
  for (const auto& f : c.fields) {
    auto it = inv.flags.find(f.name);
    if (it != inv.flags.end()) cfg[f.name] = parse_flag(it->second, f, cfg[f.name]);
    validate_field(cfg[f.name], f);
  }
  if (inv.seed) seed = *inv.seed;
  if (inv.workers) {
    if (*inv.workers == 0) throw ConfigError("/workers", "expected positive integer");
    workers = *inv.workers;
  }
  ctx.cfg = cfg;
  ctx.seed = seed;
  ctx.workers = workers;
  ctx.out = inv.out;
  ctx.hash = fnv1a_hex(json{{"command", c.name}, {"config", cfg}}.dump());
  return ctx;
}

int execute(const Command& c, const Invocation& inv) {
  Context ctx = build_context(c, inv);
  c.run(ctx);
  fs::create_directories(ctx.out);
  for (const auto& t : ctx.tables) {
    auto path = ctx.out / (t.name() + ".csv");
    t.write(path, ctx.seed, ctx.hash);
    std::cout << "wrote " << path.string() << "\n";
  }
  json summary = {{"version", kVersion},
                  {"command", c.name},
                  {"seed", ctx.seed},
                  {"config_hash", ctx.hash},
                  {"config", ctx.cfg},
                  {"results", ctx.results},
                  {"checks", {{"passed", ctx.failures.empty()}, {"failures", ctx.failures}}}};
  for (auto it = ctx.extra.begin(); it != ctx.extra.end(); ++it) summary[it.key()] = it.value();
  auto path = ctx.out / (c.name + ".json");
  std::ofstream(path, std::ios::binary) << rounded(summary).dump(2) << "\n";
  std::cout << "wrote " << path.string() << "\n";
  if (!ctx.failures.empty()) {
    for (const auto& f : ctx.failures) std::cerr << "consistency check failed: " << f << "\n";
    return 3;
  }
  return 0;
}

std::string dashed(std::string s) {
  std::replace(s.begin(), s.end(), '_', '-');
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixspt: decohered SPT information-transfer experiments"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Invocation inv;
  std::uint64_t seed_flag = 0;
  std::size_t workers_flag = 0;
  auto* seed_opt = app.add_option("--seed", seed_flag, "master seed (U64)");
  auto* workers_opt = app.add_option("--workers", workers_flag, "worker threads");
  app.add_option("--config", inv.config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", inv.out, "output directory");
  const auto cmds = commands();
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::vector<std::pair<CLI::App*, const Command*>> subs;
  for (const auto& c : cmds) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    for (const auto& f : c.fields) sub->add_option("--" + dashed(f.name), raw[c.name][f.name], f.help);
    subs.emplace_back(sub, &c);
  }
  app.add_subcommand("schema", "print the JSON schema of every subcommand config");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (app.got_subcommand("schema")) {
    json all = json::object();
    for (const auto& c : cmds) all[c.name] = command_schema(c);
    std::cout << all.dump(2) << "\n";
    return 0;
  }
  if (seed_opt->count()) inv.seed = seed_flag;
  if (workers_opt->count()) inv.workers = workers_flag;
  for (auto [sub, cmd] : subs) {
    if (!sub->parsed()) continue;
    for (const auto& f : cmd->fields)
      if (sub->count("--" + dashed(f.name))) inv.flags[f.name] = raw[cmd->name][f.name];
    try {
      return execute(*cmd, inv);
    } catch (const ConfigError& e) {
      std::cerr << "config error at " << e.what() << "\n";
      return 2;
    } catch (const SizeCapExceeded& e) {
      std::cerr << "size cap: " << e.what() << "\n";
      return 2;
    } catch (const std::invalid_argument& e) {
      std::cerr << "invalid configuration: " << e.what() << "\n";
      return 2;
    } catch (const NoCrossing& e) {
      std::cerr << "bracketing failed: " << e.what() << "\n";
      return 3;
    } catch (const InvariantViolation& e) {
      std::cerr << "consistency check failed: " << e.what() << "\n";
      return 3;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 2;
}
