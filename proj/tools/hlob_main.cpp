#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "hlob/errors.hpp"

namespace {

void add_run_flags(CLI::App* cmd, hlob::cli::RunFlags& f, bool with_preset) {
  if (with_preset)
    cmd->add_option("--preset", f.preset, "HP, LM, MM, MM+LL, MM+LM or MM+LL+LM");
  cmd->add_option("--config", f.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--horizon", f.horizon, "recorded window in seconds");
  cmd->add_option("--warmup", f.warmup, "liquidity-provider pre-roll in seconds");
  cmd->add_option("--seed", f.seed, "64-bit seed");
  cmd->add_option("--out", f.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace hlob::cli;
  CLI::App app{"Hawkes order-flow limit order book simulator"};
  app.require_subcommand(1);

  RunFlags sim_flags;
  bool snapshots = false;
  auto* sim = app.add_subcommand("simulate", "simulate one variant and write its CSVs and manifest");
  add_run_flags(sim, sim_flags, true);
  sim->add_flag("--snapshots", snapshots, "also write top-five book snapshots (book.csv)");

  std::string stream, structure;
  std::filesystem::path fit_out{"fit"};
  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit of an event stream");
  fit_cmd->add_option("stream", stream, "t,mark stream file (stream.csv)")->required();
  fit_cmd->add_option("--structure", structure, "e.g. HP, MM, MM+LM")->required();
  fit_cmd->add_option("--out", fit_out, "output directory");

  std::string snapshots_file;
  std::filesystem::path rec_out{"reconstruct"};
  auto* rec = app.add_subcommand("reconstruct", "infer orders from top-five snapshots");
  rec->add_option("snapshots", snapshots_file, "snapshot CSV")->required();
  rec->add_option("--out", rec_out, "output directory");

  std::vector<std::filesystem::path> runs;
  std::string pairing{"market-next-limit"};
  std::filesystem::path an_out{"analysis"};
  auto* an = app.add_subcommand("analyze", "distributions for one run, tests for two");
  an->add_option("runs", runs, "simulate or reconstruct output directories")
      ->required()
      ->expected(1, 2)
      ->check(CLI::ExistingDirectory);
  an->add_option("--pairing", pairing, "duration pairing");
  an->add_option("--out", an_out, "output directory");

  RunFlags cmp_flags;
  std::vector<std::string> variants;
  auto* cmp = app.add_subcommand("compare", "simulate several variants side by side");
  add_run_flags(cmp, cmp_flags, false);
  cmp->add_option("--variants", variants, "variants to run (default all six)")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return simulate(sim_flags, snapshots);
    if (*fit_cmd) return fit(stream, structure, fit_out);
    if (*rec) return reconstruct(snapshots_file, rec_out);
    if (*an) return analyze(runs, pairing, an_out);
    if (*cmp) return compare(cmp_flags, variants);
  } catch (const hlob::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const hlob::EmptyBookSide& e) {
    std::cerr << "run aborted: " << e.what() << '\n';
    return kAborted;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
