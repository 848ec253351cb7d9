#include <sstream>

#include <gtest/gtest.h>

#include "hlob/errors.hpp"
#include "hlob/run_config.hpp"

using namespace hlob;

namespace {

RunConfig load(const std::string& text, std::optional<Variant> preset = std::nullopt) {
  std::istringstream is(text);
  return load_config(is, preset);
}

}  // namespace

TEST(RunConfig, DefaultsToHpPreset) {
  const auto c = load("");
  EXPECT_EQ(c.variant, "HP");
  EXPECT_EQ(c.sim.spec.mu0, 0.22);
  EXPECT_EQ(c.sim.spec.lambda0, 1.69);
  EXPECT_EQ(c.sim.agents.m_v1, 275.0);
  EXPECT_EQ(c.sim.agents.delta, 0.015);
  EXPECT_EQ(c.sim.horizon, 86400.0);
}

TEST(RunConfig, TopLevelThenMatchingSection) {
  const std::string text =
      "# comment\n"
      "preset = MM+LL+LM\n"
      "horizon = 3600   # one hour\n"
      "delta = 0.02\n"
      "[MM+LL+LM]\n"
      "delta = 0.03\n"
      "seed = 77\n"
      "[HP]\n"
      "delta = 0.5\n"
      "[result]\n"
      "market_orders = 12\n";
  const auto c = load(text);
  EXPECT_EQ(c.variant, "MM+LL+LM");
  EXPECT_EQ(c.sim.spec.kernel_mm->beta, 5.8);
  EXPECT_EQ(c.sim.horizon, 3600.0);
  EXPECT_EQ(c.sim.agents.delta, 0.03);
  EXPECT_EQ(c.sim.seed, 77u);
  const auto hp = load(text, Variant::HP);
  EXPECT_EQ(hp.variant, "HP");
  EXPECT_EQ(hp.sim.agents.delta, 0.5);
  EXPECT_FALSE(hp.sim.spec.kernel_mm);
}

TEST(RunConfig, KernelKeys) {
  auto c = load("preset = MM\nalpha_mm = none\nalpha_lm = 2\nbeta_lm = 4\n");
  EXPECT_FALSE(c.sim.spec.kernel_mm);
  ASSERT_TRUE(c.sim.spec.kernel_lm);
  EXPECT_EQ(c.sim.spec.kernel_lm->alpha, 2.0);
  EXPECT_EQ(c.sim.spec.kernel_lm->beta, 4.0);
  c = load("cancellation = thinning\n");
  EXPECT_EQ(c.sim.agents.cancellation, CancellationRule::IndependentThinning);
}

TEST(RunConfig, WriteLoadRoundTrip) {
  auto c = RunConfig::preset(Variant::MM_LM);
  c.sim.seed = 123456789012345ULL;
  c.sim.horizon = 1234.5;
  c.sim.agents.s_p1 = 0.123456789;
  c.sim.agents.cancellation = CancellationRule::IndependentThinning;
  std::ostringstream os;
  write_config(os, c);
  const auto back = load(os.str());
  std::ostringstream again;
  write_config(again, back);
  EXPECT_EQ(again.str(), os.str());
  EXPECT_EQ(back.sim.seed, c.sim.seed);
  EXPECT_EQ(back.sim.agents.s_p1, c.sim.agents.s_p1);
  EXPECT_FALSE(back.sim.spec.kernel_ll);
  EXPECT_NE(os.str().find("alpha_ll = none"), std::string::npos);
}

TEST(RunConfig, Errors) {
  EXPECT_THROW(load("bogus = 1\n"), std::invalid_argument);
  EXPECT_THROW(load("mu0 = abc\n"), std::invalid_argument);
  EXPECT_THROW(load("seed = -1\n"), std::invalid_argument);
  EXPECT_THROW(load("cancellation = sometimes\n"), std::invalid_argument);
  EXPECT_THROW(load("preset = XX\n"), std::invalid_argument);
  EXPECT_THROW(load("[MM\n"), DataError);
  EXPECT_THROW(load("just words\n"), DataError);
  EXPECT_THROW(load("[HP]\npreset = MM\n"), std::invalid_argument);
  EXPECT_THROW(load_config(std::filesystem::path("/nonexistent/cfg.txt")), DataError);
  auto c = load("alpha_mm = 7\nbeta_mm = 6\n");
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
