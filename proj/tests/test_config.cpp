#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include <diracres/config.hpp>

using namespace diracres;

namespace {

std::string field_of(const std::vector<std::string>& overrides) {
  try {
    config::defaults(overrides);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsValidate) {
  const auto c = config::defaults();
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.grid_n, 16);
  EXPECT_EQ(c.region.sheet, -1);
  EXPECT_DOUBLE_EQ(c.rho_inner, 1.25);
}

TEST(Config, ShippedFileMatchesBuiltInDefaults) {
  std::ifstream in(DIRACRES_SOURCE_DIR "/configs/default.ini");
  ASSERT_TRUE(in);
  std::stringstream text;
  text << in.rdbuf();
  EXPECT_EQ(text.str(), std::string(config::kDefaultIni));
}

TEST(Config, RadiiOrderingNamesTheField) {
  EXPECT_EQ(field_of({"cutoff.inner=1.8"}), "cutoff.outer");
  EXPECT_EQ(field_of({"cutoff.inner=0.9"}), "cutoff.inner");
  EXPECT_EQ(field_of({"cutoff.outer=2.5"}), "cutoff.outer");
}

TEST(Config, BadValuesNameTheField) {
  EXPECT_EQ(field_of({"grid.n=abc"}), "grid.n");
  EXPECT_EQ(field_of({"scan.chart=w"}), "scan.chart");
  EXPECT_EQ(field_of({"potential.matrix=gamma"}), "potential.matrix");
  EXPECT_EQ(field_of({"scan.ppm=maybe"}), "scan.ppm");
  EXPECT_EQ(field_of({"scan.re_lo=0.5", "scan.re_hi=1.5", "scan.im_lo=-0.5", "scan.im_hi=0.5"}), "scan");
  EXPECT_EQ(field_of({"nodot=1"}), "nodot");
}

TEST(Config, OverridesApply) {
  const auto c = config::defaults({"potential.coupling=0.05", "run.seed=42", "potential.matrix=alpha3"});
  EXPECT_DOUBLE_EQ(c.coupling, 0.05);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.matrix, grid::PotentialMatrix::Alpha3);
}

TEST(Config, ModelRespectsOrdering) {
  const auto m = config::build_model(config::defaults({"grid.n=8"}));
  EXPECT_TRUE(grid::precedes(m.potential, m.rho));
  EXPECT_TRUE(m.potential.hermitian);
}
