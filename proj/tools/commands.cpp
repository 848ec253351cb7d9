#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <fmt/format.h>

#include "hlob/agents.hpp"
#include "hlob/errors.hpp"
#include "hlob/fit.hpp"
#include "hlob/ingest.hpp"
#include "hlob/stats.hpp"

namespace fs = std::filesystem;

namespace hlob::cli {

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return is;
}

// Re-throws a DataError with the file name in front of the line number.
template <typename F>
auto with_file(const fs::path& path, F&& read) {
  try {
    return read();
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<FlowEvent> flow_of(const std::vector<BookEvent>& events) {
  std::vector<FlowEvent> out;
  for (const auto& e : events)
    if (e.kind != OrderKind::Cancel) out.push_back({e.t, e.kind, e.side});
  return out;
}

std::vector<double> positive(std::vector<double> xs) {
  std::erase_if(xs, [](double x) { return !(x > 0.0); });
  return xs;
}

// The per-run statistics shared by `analyze` and `compare`.
struct RunStats {
  std::optional<SpreadDistributions> spread;
  std::vector<double> durations;
  std::vector<double> mid_variations;
  std::optional<TercileWaits> waits;
};

RunStats run_stats(const std::vector<FlowEvent>& flow, const std::vector<TimedValue>& spread,
                   const std::vector<TimedValue>& mid, std::optional<double> horizon,
                   Pairing pairing) {
  RunStats s;
  s.durations = extract_durations(flow, pairing);
  if (spread.size() >= 2) {
    s.spread = time_weighted_spread(spread, horizon);
    std::vector<double> times;
    for (const auto& e : flow) times.push_back(e.t);
    s.waits = conditional_waiting_time(spread, times);
  }
  if (!mid.empty()) s.mid_variations = mid_price_variations(mid, 30.0, 0.0, horizon);
  return s;
}

void write_run_stats(const fs::path& dir, const std::string& label, Pairing pairing,
                     const RunStats& s) {
  if (s.spread) {
    auto ev = open_out(dir / fmt::format("spread_event_{}.csv", label));
    write_weighted_csv(ev, s.spread->event_time);
    auto tw = open_out(dir / fmt::format("spread_weighted_{}.csv", label));
    write_weighted_csv(tw, s.spread->time_weighted);
  }
  if (const auto d = positive(s.durations); !d.empty()) {
    auto os = open_out(dir / fmt::format("durations_{}_{}.csv", pairing_name(pairing), label));
    write_pdf_csv(os, empirical_pdf(d, Binning::log(10)), Binning::Kind::Log);
  }
  if (!s.mid_variations.empty()) {
    // Mid-prices move in half ticks.
    auto os = open_out(dir / fmt::format("mid_variations_{}.csv", label));
    write_pdf_csv(os, empirical_pdf(s.mid_variations, Binning::linear(0.5, -0.25)),
                  Binning::Kind::Linear);
  }
  if (s.waits) {
    auto os = open_out(dir / fmt::format("spread_waits_{}.csv", label));
    os << "tercile,lower_bound,upper_bound,mean_wait_s,count\n";
    for (int k = 0; k < 3; ++k)
      os << fmt::format("{},{},{},{:.9g},{}\n", k + 1, s.waits->lower_bound, s.waits->upper_bound,
                        s.waits->mean_wait[k], s.waits->count[k]);
  }
}

TestResult named(TestResult r, std::string_view what) {
  r.test = fmt::format("{}:{}", what, r.test);
  return r;
}

std::string fmt_opt(const std::optional<ExponentialKernel>& k, bool alpha) {
  if (!k) return "none";
  return fmt::format("{}", alpha ? k->alpha : k->beta);
}

void write_result_section(std::ostream& os, const RunConfig& rc, const SimulationOutput& out) {
  const auto rates = stationary_rates(rc.sim.spec);
  const double h = rc.sim.horizon;
  const auto nm = out.count(OrderKind::Market);
  const auto nl = out.count(OrderKind::Limit);
  const auto spread = time_weighted_spread(out.spread, h);
  os << "\n[result]\n";
  os << fmt::format("market_orders = {}\nlimit_orders = {}\ncancelled_orders = {}\n", nm, nl,
                    out.count(OrderKind::Cancel));
  os << fmt::format("cancellation_ticks = {}\ntrades = {}\n", out.cancellation_ticks,
                    out.trades.size());
  os << fmt::format("predicted_market_rate = {:.9g}\nrealized_market_rate = {:.9g}\n", rates.market,
                    static_cast<double>(nm) / h);
  os << fmt::format("predicted_limit_rate = {:.9g}\nrealized_limit_rate = {:.9g}\n", rates.limit,
                    static_cast<double>(nl) / h);
  os << fmt::format("predicted_market_orders = {:.1f}\npredicted_limit_orders = {:.1f}\n",
                    rates.market * h, rates.limit * h);
  os << fmt::format("limit_fully_filled = {}\nlimit_cancelled = {}\nlimit_resting = {}\n",
                    out.accounting.fully_filled, out.accounting.cancelled, out.accounting.resting);
  os << fmt::format("resting_orders_at_end = {}\n", out.resting_orders_at_end);
  os << fmt::format("spread_mean_ticks = {:.9g}\nspread_variance = {:.9g}\n",
                    spread.time_weighted.mean(), spread.time_weighted.variance());
}

void write_simulation(const fs::path& dir, const RunConfig& rc, const SimulationOutput& out) {
  fs::create_directories(dir);
  {
    auto os = open_out(dir / "events.csv");
    write_events_csv(os, out.events);
  }
  {
    auto os = open_out(dir / "spread.csv");
    write_series_csv(os, out.spread, "spread_ticks");
  }
  {
    auto os = open_out(dir / "mid.csv");
    write_series_csv(os, out.mid, "mid_ticks");
  }
  {
    auto os = open_out(dir / "trades.csv");
    write_trades_csv(os, out.trades);
  }
  {
    auto os = open_out(dir / "stream.csv");
    write_event_stream(os, out.order_flow);
  }
  if (!out.snapshots.empty()) {
    auto os = open_out(dir / "book.csv");
    write_snapshot_header(os);
    for (const auto& s : out.snapshots) write_snapshot(os, s);
  }
  auto os = open_out(dir / "manifest.txt");
  write_config(os, rc);
  write_result_section(os, rc, out);
}

}  // namespace

RunConfig resolve(const RunFlags& flags, std::optional<Variant> variant) {
  if (!variant && flags.preset) variant = parse_variant(*flags.preset);
  RunConfig rc = flags.config ? with_file(*flags.config, [&] { return load_config(*flags.config, variant); })
                              : RunConfig::preset(variant.value_or(Variant::HP));
  if (flags.horizon) rc.sim.horizon = *flags.horizon;
  if (flags.warmup) rc.sim.warmup = *flags.warmup;
  if (flags.seed) rc.sim.seed = *flags.seed;
  if (flags.out) rc.out = *flags.out;
  rc.validate();
  return rc;
}

int simulate(const RunFlags& flags, bool snapshots) {
  RunConfig rc = resolve(flags);
  rc.sim.record_snapshots = snapshots;
  const auto t0 = std::chrono::steady_clock::now();
  const SimulationOutput out = run_simulation(rc.sim);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_simulation(rc.out, rc, out);
  const auto rates = stationary_rates(rc.sim.spec);
  fmt::print("{} seed {}: {} market, {} limit, {} cancel orders over {} s ({:.2f} s wall)\n",
             rc.variant, rc.sim.seed, out.count(OrderKind::Market), out.count(OrderKind::Limit),
             out.count(OrderKind::Cancel), rc.sim.horizon, secs);
  fmt::print("predicted {:.0f} market, {:.0f} limit; output in {}\n", rates.market * rc.sim.horizon,
             rates.limit * rc.sim.horizon, rc.out.string());
  return kOk;
}

int fit(const fs::path& stream_path, const std::string& structure_text, const fs::path& out) {
  const Structure structure = Structure::parse(structure_text);
  auto is = open_in(stream_path);
  const EventStream stream = with_file(stream_path, [&] { return read_event_stream(is); });
  const FitResult r = fit_mle(stream, structure);

  const auto exp1 = [](double x) { return x > 0.0 ? 1.0 - std::exp(-x) : 0.0; };
  fs::create_directories(out);
  auto os = open_out(out / "fit.txt");
  const auto& s = r.spec;
  os << fmt::format("structure = {}\nmu0 = {}\nlambda0 = {}\n", structure.name(), s.mu0, s.lambda0);
  for (const auto& [name, k] : {std::pair{"mm", s.kernel_mm}, std::pair{"lm", s.kernel_lm},
                                std::pair{"ll", s.kernel_ll}}) {
    os << fmt::format("alpha_{} = {}\n", name, fmt_opt(k, true));
    if (k) os << fmt::format("beta_{} = {}\n", name, fmt_opt(k, false));
  }
  os << "\n[result]\n";
  os << fmt::format("converged = {}\nlog_likelihood = {:.12g}\niterations = {}\nevaluations = {}\n",
                    r.converged, r.log_likelihood, r.iterations, r.evaluations);
  os << fmt::format("horizon = {}\nmarket_events = {}\nlimit_events = {}\n", stream.horizon(),
                    stream.count(Mark::Market), stream.count(Mark::Limit));
  for (const Mark m : {Mark::Market, Mark::Limit}) {
    const auto res = residuals(s, stream, m);
    const char* name = m == Mark::Market ? "market" : "limit";
    if (res.empty()) {
      os << fmt::format("residual_ks_{}_p = nan\n", name);
      continue;
    }
    const auto ks = ks_one_sample(res, exp1);
    os << fmt::format("residual_ks_{0}_statistic = {1:.9g}\nresidual_ks_{0}_p = {2:.9g}\n", name,
                      ks.statistic, ks.p_value);
  }

  fmt::print("{}: log-likelihood {:.6f}, {} evaluations, {}\n", structure.name(), r.log_likelihood,
             r.evaluations, r.converged ? "converged" : "NOT converged");
  if (!r.converged) {
    std::cerr << "fit did not converge; see " << (out / "fit.txt").string() << '\n';
    return kNonConvergence;
  }
  return kOk;
}

int reconstruct(const fs::path& snapshots_path, const fs::path& out) {
  const auto snaps = with_file(snapshots_path, [&] { return parse_snapshots(snapshots_path); });
  const Reconstruction rec = reconstruct(snaps);
  fs::create_directories(out);
  {
    auto os = open_out(out / "orders.csv");
    write_orders_csv(os, rec.orders);
  }
  const auto flow = to_flow_events(rec.orders);
  for (const Pairing p : {Pairing::AllEvents, Pairing::MarketNextLimit, Pairing::LimitNextMarket,
                          Pairing::MarketNextLimitSameSide, Pairing::MarketNextLimitOppositeSide}) {
    auto os = open_out(out / fmt::format("durations_{}.csv", pairing_name(p)));
    os << "duration_s\n";
    for (const double d : extract_durations(flow, p)) os << fmt::format("{:.3f}\n", d);
  }
  const auto& d = rec.diagnostics;
  auto os = open_out(out / "diagnostics.txt");
  os << fmt::format("snapshots = {}\norders = {}\n", snaps.size(), rec.orders.size());
  os << fmt::format("window_entries = {}\nwindow_exits = {}\nunexplained_trade = {}\nambiguous_side = {}\n",
                    d.window_entries, d.window_exits, d.unexplained_trade, d.ambiguous_side);
  fmt::print("{} snapshots -> {} orders\n", snaps.size(), rec.orders.size());
  return kOk;
}

int analyze(const std::vector<fs::path>& runs, const std::string& pairing_text, const fs::path& out) {
  const Pairing pairing = parse_pairing(pairing_text);
  fs::create_directories(out);
  std::vector<RunStats> stats;
  std::vector<std::string> labels;
  for (const auto& dir : runs) {
    std::vector<FlowEvent> flow;
    std::vector<TimedValue> spread, mid;
    std::optional<double> horizon;
    if (fs::exists(dir / "events.csv")) {
      auto is = open_in(dir / "events.csv");
      flow = flow_of(with_file(dir / "events.csv", [&] { return read_events_csv(is); }));
    } else if (fs::exists(dir / "orders.csv")) {
      auto is = open_in(dir / "orders.csv");
      flow = to_flow_events(with_file(dir / "orders.csv", [&] { return read_orders_csv(is); }));
    } else {
      throw DataError(fmt::format("{}: no events.csv or orders.csv", dir.string()));
    }
    if (fs::exists(dir / "spread.csv")) {
      auto is = open_in(dir / "spread.csv");
      spread = with_file(dir / "spread.csv", [&] { return read_series_csv(is); });
    }
    if (fs::exists(dir / "mid.csv")) {
      auto is = open_in(dir / "mid.csv");
      mid = with_file(dir / "mid.csv", [&] { return read_series_csv(is); });
    }
    if (fs::exists(dir / "manifest.txt"))
      horizon = with_file(dir / "manifest.txt", [&] { return load_config(dir / "manifest.txt"); }).sim.horizon;
    stats.push_back(run_stats(flow, spread, mid, horizon, pairing));

    std::string label = fs::path(dir).lexically_normal().filename().string();
    if (label.empty()) label = fs::path(dir).lexically_normal().parent_path().filename().string();
    if (label.empty() || std::find(labels.begin(), labels.end(), label) != labels.end())
      label = fmt::format("run{}", labels.size() + 1);
    labels.push_back(label);
    write_run_stats(out, label, pairing, stats.back());
    fmt::print("{}: {} {} durations\n", label, stats.back().durations.size(), pairing_name(pairing));
  }

  if (stats.size() == 2) {
    const auto& a = stats[0];
    const auto& b = stats[1];
    std::vector<TestResult> tests;
    if (a.durations.empty() || b.durations.empty())
      throw DataError(fmt::format("no {} durations in one of the runs", pairing_name(pairing)));
    tests.push_back(named(mann_whitney(a.durations, b.durations), "durations"));
    tests.push_back(named(ks_two_sample(a.durations, b.durations), "durations"));
    tests.push_back(named(cvm_two_sample(a.durations, b.durations), "durations"));
    if (!a.mid_variations.empty() && !b.mid_variations.empty()) {
      tests.push_back(named(ks_two_sample(a.mid_variations, b.mid_variations), "mid_variations"));
      tests.push_back(named(cvm_two_sample(a.mid_variations, b.mid_variations), "mid_variations"));
    }
    auto os = open_out(out / "tests.csv");
    write_tests_csv(os, tests);
    fmt::print("a = {}, b = {}\n", labels[0], labels[1]);
    for (const auto& t : tests)
      fmt::print("{:<28} statistic {:<12.6g} p {:<12.6g} {}\n", t.test, t.statistic, t.p_value,
                 direction_name(t.direction));
  }
  return kOk;
}

int compare(const RunFlags& flags, const std::vector<std::string>& names) {
  std::vector<Variant> variants;
  for (const auto& n : names) variants.push_back(parse_variant(n));
  if (variants.empty()) variants.assign(kAllVariants.begin(), kAllVariants.end());

  const fs::path root = flags.out.value_or("compare");
  std::vector<RunConfig> configs;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    RunFlags f = flags;
    f.out.reset();
    RunConfig rc = resolve(f, variants[i]);
    rc.sim.seed += i;
    rc.out = root / rc.variant;
    configs.push_back(rc);
  }

  std::vector<std::optional<SimulationOutput>> outputs(configs.size());
  std::vector<std::exception_ptr> errors(configs.size());
  {
    std::vector<std::jthread> workers;
    for (std::size_t i = 0; i < configs.size(); ++i)
      workers.emplace_back([&, i] {
        try {
          outputs[i] = run_simulation(configs[i].sim);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
  }

  fs::create_directories(root);
  auto summary = open_out(root / "summary.csv");
  summary << "variant,seed,market_orders,limit_orders,cancelled_orders,spread_mean,spread_variance,"
             "small_spread_mass,mid_variation_sd\n";
  int rc = kOk;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& cfg = configs[i];
    if (errors[i]) {
      try {
        std::rethrow_exception(errors[i]);
      } catch (const EmptyBookSide& e) {
        std::cerr << cfg.variant << ": aborted: " << e.what() << '\n';
        rc = kAborted;
        continue;
      }
    }
    const auto& out = *outputs[i];
    write_simulation(cfg.out, cfg, out);
    const RunStats s = run_stats(out.flow_events(), out.spread, out.mid, cfg.sim.horizon,
                                 Pairing::MarketNextLimit);
    write_run_stats(root, cfg.variant, Pairing::MarketNextLimit, s);
    double ss = 0.0;
    for (const double x : s.mid_variations) ss += x * x;
    const double sd = s.mid_variations.empty() ? NAN : std::sqrt(ss / s.mid_variations.size());
    const auto& tw = s.spread->time_weighted;
    summary << fmt::format("{},{},{},{},{},{:.9g},{:.9g},{:.9g},{:.9g}\n", cfg.variant, cfg.sim.seed,
                           out.count(OrderKind::Market), out.count(OrderKind::Limit),
                           out.count(OrderKind::Cancel), tw.mean(), tw.variance(),
                           tw.mass_at_or_below(2.0), sd);
    fmt::print("{:<9} seed {:<4} {} market, {} limit, mean spread {:.3f} ticks\n", cfg.variant,
               cfg.sim.seed, out.count(OrderKind::Market), out.count(OrderKind::Limit), tw.mean());
  }
  return rc;
}

}  // namespace hlob::cli
