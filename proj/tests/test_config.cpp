#include "vdc/config.hpp"
#include "vdc/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace vdc {
namespace {

std::string where_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    return e.where();
  }
  return "<no error>";
}

TEST(Config, Presets) {
  EXPECT_EQ(default_config("fig5").scenario.segment_time, 5.0);
  EXPECT_EQ(default_config("fig6").scenario.segment_time, 2.0);
  EXPECT_EQ(default_config("fig7").scenario.wall.stiffness, 1500.0);
  EXPECT_EQ(default_config("fig5").scenario.wall.mass, 0.14);
  EXPECT_FALSE(default_config("free").scenario.wall.enabled);
  EXPECT_EQ(default_config("zwidth").scenario.path, PathKind::Press);
  EXPECT_THROW(default_config("fig9"), ConfigError);
  for (const auto& p : preset_names()) EXPECT_NO_THROW(default_config(p));
}

TEST(Config, FileOverridesPreset) {
  const Config c = parse_config(R"({"preset": "fig6", "wall": {"k_e": 1500}, "sim": {"dt": 0.0005}})", "t", "default");
  EXPECT_EQ(c.scenario.segment_time, 2.0);
  EXPECT_EQ(c.scenario.wall.stiffness, 1500.0);
  EXPECT_EQ(c.scenario.dt, 0.0005);
}

TEST(Config, UnknownKeyReportsPointer) {
  EXPECT_EQ(where_of([] { parse_config(R"({"wall": {"k_f": 3}})", "t", "default"); }), "/wall/k_f");
  EXPECT_EQ(where_of([] { parse_config(R"({"walls": {}})", "t", "default"); }), "/walls");
}

TEST(Config, WrongTypeReportsPointer) {
  EXPECT_EQ(where_of([] { parse_config(R"({"wall": {"k_e": "stiff"}})", "t", "default"); }), "/wall/k_e");
  EXPECT_EQ(where_of([] { parse_config(R"({"path": {"kind": "circle"}})", "t", "default"); }), "/path/kind");
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
  EXPECT_EQ(where_of([] { parse_config("{\n  \"wall\": {\"k_e\": 1500,, }\n}\n", "cfg.json", "default"); }),
            "cfg.json:2:24");
}

TEST(Config, SchemaIsChecked) {
  EXPECT_NO_THROW(parse_config(R"({"schema": "vdcbench.config/1"})", "t", "default"));
  EXPECT_EQ(where_of([] { parse_config(R"({"schema": "vdcbench.config/9"})", "t", "default"); }), "/schema");
}

TEST(Config, Overrides) {
  Config c = default_config("default");
  apply_override(c, "wall.k_e=1500");
  apply_override(c, "path.kind=press");
  apply_override(c, "gains.K_D=2");
  EXPECT_EQ(c.scenario.wall.stiffness, 1500.0);
  EXPECT_EQ(c.scenario.path, PathKind::Press);
  EXPECT_EQ(c.scenario.gains.body_damping, Diag6::Constant(2.0));
  EXPECT_THROW(apply_override(c, "wall.k_f=3"), ConfigError);
  EXPECT_THROW(apply_override(c, "wall.k_e"), ConfigError);
  EXPECT_THROW(apply_override(c, "wall.k_e=abc"), ConfigError);
}

TEST(Config, FinalizeValidates) {
  Config c = default_config("default");
  apply_override(c, "gains.gamma=-1");
  EXPECT_THROW(finalize(c, ""), ConfigError);

  Config r = default_config("default");
  apply_override(r, "robot_file=does_not_exist.json");
  EXPECT_THROW(finalize(r, ""), ConfigError);

  Config ok = default_config("fig6");
  finalize(ok, "");
  ASSERT_TRUE(ok.scenario.model);
  EXPECT_EQ(ok.scenario.model->dof(), 7);
  EXPECT_EQ(ok.zwidth.base.segment_time, 2.0);
}

TEST(Config, JsonRoundTrip) {
  Config c = default_config("fig7");
  apply_override(c, "wall.b_e=12.5");
  const auto j = config_to_json(c);
  const Config back = parse_config(j.dump(), "t", "default");
  EXPECT_EQ(config_to_json(back), j);
}

TEST(Config, SchemaListsEveryKey) {
  const auto s = describe_schema();
  std::set<std::string> keys;
  for (const auto& k : s["keys"]) keys.insert(k["key"].get<std::string>());
  for (const char* k : {"wall.k_e", "wall.m_d", "wall.energy_rule", "gains.gamma", "sim.dt", "zwidth.k_max"}) {
    EXPECT_TRUE(keys.count(k)) << k;
  }
  EXPECT_EQ(s["presets"].size(), preset_names().size());
}

TEST(Robot, RoundTripPreservesDynamics) {
  const RobotModel a = RobotModel::default_arm();
  const RobotModel b = parse_robot(robot_to_json(a).dump(), "arm.json");
  ASSERT_EQ(a.dof(), b.dof());
  VecX q(7), qd(7), tau(7);
  q << 0.1, -0.4, 0.3, 1.2, -0.2, 0.5, 0.1;
  qd << 0.3, 0.1, -0.2, 0.4, 0.0, -0.5, 0.2;
  tau << 1, -2, 0.5, 3, 0.1, -0.2, 0.05;
  EXPECT_EQ(a.forward_dynamics(q, qd, tau, Vec6::Zero()), b.forward_dynamics(q, qd, tau, Vec6::Zero()));
  EXPECT_EQ(robot_to_json(b), robot_to_json(a));
}

TEST(Robot, MissingAndUnknownKeys) {
  auto j = robot_to_json(RobotModel::default_arm());
  j["links"][2].erase("motor_inertia");
  EXPECT_EQ(where_of([&] { parse_robot(j.dump(), "arm.json"); }), "/links/2");
  auto k = robot_to_json(RobotModel::default_arm());
  k["links"][0]["colour"] = "red";
  EXPECT_EQ(where_of([&] { parse_robot(k.dump(), "arm.json"); }), "/links/0/colour");
}

TEST(Robot, FileIsResolvedRelativeToConfig) {
  const auto dir = std::filesystem::temp_directory_path() / "vdc_config_test";
  std::filesystem::create_directories(dir / "robots");
  {
    std::ofstream(dir / "robots" / "arm.json") << robot_to_json(RobotModel::default_arm()).dump(2);
    std::ofstream(dir / "run.json") << R"({"robot_file": "robots/arm.json"})";
  }
  Config c = load_config((dir / "run.json").string(), "default");
  EXPECT_NO_THROW(finalize(c, dir.string()));
  EXPECT_EQ(c.scenario.model->dof(), 7);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace vdc
