#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "homebot/error.hpp"
#include "homebot/world/map.hpp"
#include "homebot/world/world.hpp"

using namespace homebot;
using namespace homebot::world;
using nlohmann::json;

namespace {

json open_room(int w, int h) {
  return {{"grid", {{"width", w}, {"height", h}, {"cell_size", 0.1}}},
          {"rooms", json::array({{{"name", "room"}, {"rect", {0, 0, w - 1, h - 1}}}})}};
}

WorldState empty_world(int w = 40, int h = 40) {
  WorldState s;
  s.map = load_map(open_room(w, h));
  return s;
}

AgentState person(Vec2 at) {
  AgentState a;
  a.id = "p";
  a.position = at;
  return a;
}

WorldState run(WorldState s, int steps, double dt = 0.1) {
  for (int k = 0; k < steps; ++k) s = step_world(std::move(s), dt);
  return s;
}

}  // namespace

TEST(Map, DefaultApartment) {
  const auto m = default_apartment();
  EXPECT_EQ(m.rooms().size(), 4u);
  int pressure = 0, contact = 0, pir = 0;
  for (const auto& s : m.sensors()) {
    pressure += s.kind == SensorKind::Pressure;
    contact += s.kind == SensorKind::Contact;
    pir += s.kind == SensorKind::PIR;
  }
  EXPECT_EQ(pressure, 4);
  EXPECT_EQ(contact, 3);
  EXPECT_EQ(pir, 4);
  EXPECT_DOUBLE_EQ(m.width() * m.cell_size(), 3.0);
  EXPECT_EQ(m.find_sensor("p_bathroom")->room, "bathroom");
}

TEST(Map, BundledFileMatchesEmbeddedDefault) {
  const auto file = load_map_file(HOMEBOT_SOURCE_DIR "/maps/apartment_3x3.json");
  const auto embedded = default_apartment();
  EXPECT_EQ(file.width(), embedded.width());
  EXPECT_EQ(file.sensors().size(), embedded.sensors().size());
}

TEST(Map, TrivialMap) {
  const auto m = load_map(open_room(1, 1));
  EXPECT_EQ(m.width(), 1);
  EXPECT_TRUE(m.is_free({0, 0}));
  EXPECT_TRUE(m.sensors().empty());
}

TEST(Map, SensorOnWallNamesSensor) {
  auto d = open_room(5, 5);
  d["grid"]["walls"] = json::array({{2, 2, 2, 2}});
  d["sensors"] = json::array({{{"id", "mat_7"}, {"kind", "pressure"}, {"cell", {2, 2}}}});
  try {
    (void)load_map(d);
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("mat_7"), std::string::npos);
  }
}

TEST(Map, MalformedDocuments) {
  EXPECT_THROW((void)load_map_text("{not json"), ParseError);
  EXPECT_THROW((void)load_map(json{{"grid", {{"width", "wide"}}}}), ParseError);
  auto d = open_room(5, 5);
  d["sensors"] = json::array({{{"id", "x"}, {"kind", "sonar"}, {"cell", {1, 1}}}});
  EXPECT_THROW((void)load_map(d), ParseError);
  EXPECT_THROW((void)load_map_file("/nonexistent/map.json"), Error);
}

TEST(Map, CellGeometry) {
  const auto m = load_map(open_room(10, 10));
  EXPECT_EQ(m.cell_of(Vec2(0.25, 0.71)), (Cell{2, 7}));
  EXPECT_TRUE(m.center_of({2, 7}).isApprox(Vec2(0.25, 0.75)));
  EXPECT_FALSE(m.in_bounds(m.cell_of(Vec2(-0.01, 0.5))));
}

TEST(World, EmptyWorldOnlyAdvancesClock) {
  const auto before = empty_world();
  const auto after = step_world(before, 0.1);
  EXPECT_DOUBLE_EQ(after.clock, 0.1);
  EXPECT_EQ(after.tick, 1u);
  EXPECT_TRUE(after.agents.empty());
  EXPECT_TRUE(after.exhalations.empty());
  EXPECT_EQ(after.robot.position, before.robot.position);
}

TEST(World, RejectsNonPositiveStep) {
  EXPECT_THROW(step_world(empty_world(), 0.0), InvalidArgument);
}

TEST(World, WalkingKinematics) {
  auto s = empty_world();
  auto a = person(Vec2(1.0, 2.0));
  a.breathing_interval = 0.0;
  a.script.push_back({std::nullopt, MoveTo{{Vec2(3.0, 2.0)}, 0.3}});
  s.agents.push_back(a);
  s = run(std::move(s), 10);
  EXPECT_NEAR(s.agents[0].position.x(), 1.3, 1e-9);
  EXPECT_NEAR(s.agents[0].position.y(), 2.0, 1e-12);
}

TEST(World, WallsStopWalkers) {
  auto d = open_room(20, 20);
  d["grid"]["walls"] = json::array({{10, 0, 10, 19}});
  WorldState s;
  s.map = load_map(d);
  auto a = person(Vec2(0.55, 0.55));
  a.script.push_back({std::nullopt, MoveTo{{Vec2(1.55, 0.55)}, 0.5}});
  s.agents.push_back(a);
  s = run(std::move(s), 50);
  EXPECT_TRUE(s.agents[0].blocked);
  EXPECT_LT(s.agents[0].position.x(), 1.0);
}

TEST(World, ExhalationCount) {
  auto s = empty_world();
  auto a = person(Vec2(2.0, 2.0));
  a.breathing_interval = 4.0;
  a.next_exhale = 4.0;
  s.agents.push_back(a);
  int count = 0;
  for (int k = 0; k < 600; ++k) {
    s = step_world(std::move(s), 0.1);
    count += static_cast<int>(s.step_exhalations.size());
  }
  EXPECT_EQ(count, 15);
}

TEST(World, ScriptTimingAndFall) {
  auto s = empty_world();
  auto a = person(Vec2(2.0, 2.0));
  a.script.push_back({5.0, Fall{FallDirection::Backward}});
  s.agents.push_back(a);
  s = run(std::move(s), 49);
  EXPECT_FALSE(s.agents[0].fallen);
  s = run(std::move(s), 2);
  EXPECT_TRUE(s.agents[0].fallen);
  EXPECT_EQ(s.agents[0].fall_direction, FallDirection::Backward);
  EXPECT_GT(s.agents[0].footprint(s.map).size(), 5u);
  EXPECT_LT(s.agents[0].face_height(), 0.5);
  // Fallen agents ignore later movement.
  s.agents[0].script.push_back({std::nullopt, MoveTo{{Vec2(3.0, 3.0)}, 0.5}});
  const Vec2 lying = s.agents[0].position;
  s = run(std::move(s), 20);
  EXPECT_EQ(s.agents[0].position, lying);
}

TEST(World, FallNeverCrossesWalls) {
  auto d = open_room(30, 30);
  d["grid"]["walls"] = json::array({{15, 0, 15, 29}});
  WorldState s;
  s.map = load_map(d);
  auto a = person(Vec2(1.35, 1.5));
  a.heading = 0.0;
  a.script.push_back({std::nullopt, Fall{FallDirection::Forward}});
  s.agents.push_back(a);
  s = run(std::move(s), 2);
  for (const Cell c : s.agents[0].footprint(s.map)) EXPECT_TRUE(s.map.is_free(c)) << c.x << "," << c.y;
}

TEST(World, ExitAndEnter) {
  auto s = empty_world();
  auto a = person(Vec2(2.0, 2.0));
  a.script.push_back({std::nullopt, Exit{}});
  a.script.push_back({3.0, Enter{Vec2(1.0, 1.0)}});
  s.agents.push_back(a);
  s = run(std::move(s), 5);
  EXPECT_TRUE(s.agents[0].away);
  EXPECT_TRUE(s.step_exhalations.empty());
  s = run(std::move(s), 30);
  EXPECT_FALSE(s.agents[0].away);
  EXPECT_TRUE(s.agents[0].position.isApprox(Vec2(1.0, 1.0)));
}

TEST(World, FallVectors) {
  EXPECT_TRUE(fall_vector(0.0, FallDirection::Forward).isApprox(Vec2(1, 0)));
  EXPECT_TRUE(fall_vector(0.0, FallDirection::Left).isApprox(Vec2(0, 1)));
  EXPECT_TRUE(fall_vector(0.0, FallDirection::Backward).isApprox(Vec2(-1, 0)));
  EXPECT_TRUE(fall_vector(0.0, FallDirection::Right).isApprox(Vec2(0, -1)));
  EXPECT_EQ(fall_direction_from_string("left"), FallDirection::Left);
}

TEST(World, PropCools) {
  const Prop kettle{"kettle", Vec2(1, 1), 0.2, 60.0, 22.0, 600.0, 0.0};
  EXPECT_DOUBLE_EQ(kettle.temperature(0.0), 60.0);
  EXPECT_LT(kettle.temperature(3600.0), 25.0);
}
