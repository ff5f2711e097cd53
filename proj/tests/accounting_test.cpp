#include <gtest/gtest.h>

#include "ecoinfer/accounting.hpp"
#include "ecoinfer/error.hpp"
#include "ecoinfer/grid.hpp"
#include "support/fixtures.hpp"

using namespace ecoinfer;

namespace {

ClusterConfig a100() {
  ClusterConfig c;
  c.gpu = builtin_gpu("a100-sxm4-80g");
  c.model = builtin_model("llama-3-8b");
  return c;
}

}  // namespace

TEST(Accounting, UnitConversionAndPue) {
  const std::vector<PowerSample> s{{0.0, 3600.0, 400.0}};
  EXPECT_NEAR(energy(s, a100(), 1.0).e_op_kwh, 0.4, 1e-12);
  const auto e = energy(s, a100(), 1.2);
  EXPECT_NEAR(e.e_op_kwh, 0.48, 1e-12);
  EXPECT_NEAR(e.it_energy_kwh, 0.4, 1e-12);
  EXPECT_NEAR(e.gpu_hours, 1.0, 1e-12);
  EXPECT_NEAR(e.mean_gpu_power_w, 400.0, 1e-9);
}

TEST(Accounting, GpuHoursCountProvisionedGpus) {
  auto c = a100();
  c.replicas = 2;
  c.tensor_parallel = 2;
  c.pipeline_parallel = 2;
  const std::vector<PowerSample> s{{0.0, 1800.0, 800.0}};
  const auto e = energy(s, c, 1.0);
  EXPECT_NEAR(e.gpu_hours, 0.5 * 8, 1e-12);
  EXPECT_NEAR(e.mean_gpu_power_w, 800.0 / 8, 1e-9);
}

TEST(Accounting, StaticCarbon) {
  EnergyReport e;
  e.e_op_kwh = 5.90;
  const auto c = carbon_static(e, 418.2, builtin_gpu("a100-sxm4-80g"));
  EXPECT_NEAR(c.c_total_g, 2467.38, 1e-6);
  EXPECT_NEAR(c.c_total_g / 1000.0, 2.47, 0.005);
  EXPECT_EQ(c.c_embodied_g, 0.0);

  EXPECT_EQ(carbon_static(e, 0.0, builtin_gpu("a100-sxm4-80g")).c_total_g, 0.0);

  auto g = builtin_gpu("h100-sxm5");
  g.phi_manuf_g_per_gpu_hour = 10.0;
  EnergyReport idle;
  idle.gpu_hours = 2.0;
  idle.pue = 1.5;  // never scales embodied carbon
  const auto emb = carbon_static(idle, 300.0, g);
  EXPECT_DOUBLE_EQ(emb.c_embodied_g, 20.0);
  EXPECT_DOUBLE_EQ(emb.c_total_g, 20.0);
}

TEST(Accounting, TraceCarbonAgreesWithStaticWhenFlat) {
  PowerSeries load;
  load.start = fixtures::day_start();
  load.values.assign(120, 300.0);
  EnvTrace ci;
  ci.kind = EnvKind::CarbonIntensity;
  for (int m = 0; m < 120; ++m) {
    ci.timestamps.push_back(load.start + std::chrono::minutes{m});
    ci.values.push_back(418.2);
  }
  EnergyReport e;
  e.e_op_kwh = 300.0 * 2 / 1000.0 * 1.2;
  e.gpu_hours = 2.0;
  const auto gpu = builtin_gpu("a100-sxm4-80g");
  const auto dyn = carbon_trace(load, ci, 1.2, e, gpu);
  const auto fixed = carbon_static(e, 418.2, gpu);
  EXPECT_NEAR(dyn.c_total_g, fixed.c_total_g, 1e-9 * fixed.c_total_g);
  EXPECT_NEAR(dyn.ci_used, 418.2, 1e-9);
}

TEST(Accounting, DegenerateMicrogridMatchesStaticCarbon) {
  // no solar and an empty battery: every watt comes from the grid
  auto s = fixtures::square_wave_day();
  for (auto& v : s.solar.values) v = 0.0;
  s.battery.soc_init = s.battery.soc_min;
  const auto r = cosimulate(s);
  EnergyReport e;
  e.e_op_kwh = r.report.total_demand_kwh;
  const auto c = carbon_static(e, 418.2, builtin_gpu("a100-sxm4-80g"));
  EXPECT_NEAR(r.report.net_footprint_g, c.c_total_g, 1e-9 * c.c_total_g);
  EXPECT_NEAR(r.report.grid_import_kwh, r.report.total_demand_kwh, 1e-12);
}

TEST(Accounting, Errors) {
  EXPECT_THROW(energy(std::vector<PowerSample>{}, a100(), 1.2), DataError);
  const std::vector<PowerSample> s{{0.0, 1.0, 1.0}};
  EXPECT_THROW(energy(s, a100(), 0.9), ConfigError);
}
