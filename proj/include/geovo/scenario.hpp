#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geovo/errors.hpp"
#include "geovo/geometry.hpp"

namespace geovo {

/// Defaults follow the reference simulation setup (dt 0.05 s, N 6, 0.4 m/s,
/// 1.0 m/s^2, 0.03 m margin).
struct ScenarioParams {
  double dt = 0.05;
  int N = 6;
  double v_max = 0.4;
  double a_max = 1.0;
  double d_s = 0.03;
  double goal_tol = 0.05;
  double max_time = 30.0;
};

struct RobotSpec {
  Vec2 start;
  Vec2 goal;
  double r = 0.1;
};

struct ObstacleSpec {
  Vec2 center;
  double radius = 0.0;
  Vec2 velocity;

  bool dynamic() const { return velocity.x != 0.0 || velocity.y != 0.0; }
};

struct Scenario {
  std::string name;
  RobotSpec robot;
  std::vector<ObstacleSpec> obstacles;
  ScenarioParams params;
  long long seed = 0;

  void validate() const {
    auto finite = [](const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); };
    if (!finite(robot.start)) throw ValidationError("robot.start", "must be finite");
    if (!finite(robot.goal)) throw ValidationError("robot.goal", "must be finite");
    if (!(robot.r > 0.0)) throw ValidationError("robot.r", "must be positive");
    for (std::size_t i = 0; i < obstacles.size(); ++i) {
      const std::string p = "obstacles[" + std::to_string(i) + "]";
      if (!finite(obstacles[i].center)) throw ValidationError(p + ".center", "must be finite");
      if (!finite(obstacles[i].velocity)) throw ValidationError(p + ".velocity", "must be finite");
      if (!(obstacles[i].radius > 0.0)) throw ValidationError(p + ".radius", "must be positive");
    }
    if (!(params.dt > 0.0)) throw ValidationError("params.dt", "must be positive");
    if (params.N < 1) throw ValidationError("params.N", "must be >= 1");
    if (!(params.v_max > 0.0)) throw ValidationError("params.v_max", "must be positive");
    if (!(params.a_max > 0.0)) throw ValidationError("params.a_max", "must be positive");
    if (!(params.d_s >= 0.0)) throw ValidationError("params.d_s", "must be non-negative");
    if (!(params.goal_tol > 0.0)) throw ValidationError("params.goal_tol", "must be positive");
    if (!(params.max_time > 0.0)) throw ValidationError("params.max_time", "must be positive");
  }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError("field '" + where + "': expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; }))
      throw ParseError("field '" + (where.empty() ? it.key() : where + "." + it.key()) + "': unknown field");
  }
}

inline double read_number(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError("field '" + path + "': expected a number");
  return v.get<double>();
}

inline Vec2 read_vec2(const json& obj, const std::string& key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ParseError("field '" + path + "': expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

inline json vec_json(const Vec2& v) { return json::array({v.x, v.y}); }

} // namespace detail

/// Parses and validates a scenario document. Omitted params take their
/// defaults; unknown fields are rejected.
inline Scenario parse_scenario(const std::string& text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(detail::line_of(text, e.byte)) + ": " + e.what());
  }
  detail::reject_unknown(doc, "", {"name", "robot", "obstacles", "params", "seed"});

  Scenario s;
  auto require = [&](const json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key)) throw ParseError("field '" + path + "': missing");
  };
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ParseError("field 'name': expected a string");
    s.name = doc["name"].get<std::string>();
  }
  require(doc, "robot", "robot");
  const json& robot = doc["robot"];
  detail::reject_unknown(robot, "robot", {"start", "goal", "r"});
  require(robot, "start", "robot.start");
  require(robot, "goal", "robot.goal");
  s.robot.start = detail::read_vec2(robot, "start", "robot.start");
  s.robot.goal = detail::read_vec2(robot, "goal", "robot.goal");
  if (robot.contains("r")) s.robot.r = detail::read_number(robot, "r", "robot.r");

  if (doc.contains("obstacles")) {
    if (!doc["obstacles"].is_array()) throw ParseError("field 'obstacles': expected an array");
    std::size_t i = 0;
    for (const json& o : doc["obstacles"]) {
      const std::string p = "obstacles[" + std::to_string(i++) + "]";
      detail::reject_unknown(o, p, {"center", "radius", "velocity"});
      require(o, "center", p + ".center");
      require(o, "radius", p + ".radius");
      ObstacleSpec ob;
      ob.center = detail::read_vec2(o, "center", p + ".center");
      ob.radius = detail::read_number(o, "radius", p + ".radius");
      if (o.contains("velocity")) ob.velocity = detail::read_vec2(o, "velocity", p + ".velocity");
      s.obstacles.push_back(ob);
    }
  }

  if (doc.contains("params")) {
    const json& pj = doc["params"];
    detail::reject_unknown(pj, "params", {"dt", "N", "v_max", "a_max", "d_s", "goal_tol", "max_time"});
    auto num = [&](const char* key, double& dst) {
      if (pj.contains(key)) dst = detail::read_number(pj, key, std::string("params.") + key);
    };
    num("dt", s.params.dt);
    num("v_max", s.params.v_max);
    num("a_max", s.params.a_max);
    num("d_s", s.params.d_s);
    num("goal_tol", s.params.goal_tol);
    num("max_time", s.params.max_time);
    if (pj.contains("N")) {
      if (!pj["N"].is_number_integer()) throw ParseError("field 'params.N': expected an integer");
      s.params.N = pj["N"].get<int>();
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer()) throw ParseError("field 'seed': expected an integer");
    s.seed = doc["seed"].get<long long>();
  }
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  Scenario s = parse_scenario(ss.str());
  if (s.name.empty()) {
    const auto slash = path.find_last_of('/');
    std::string stem = path.substr(slash == std::string::npos ? 0 : slash + 1);
    s.name = stem.substr(0, stem.find_last_of('.'));
  }
  return s;
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  using detail::json;
  using detail::vec_json;
  json obs = json::array();
  for (const auto& o : s.obstacles)
    obs.push_back({{"center", vec_json(o.center)}, {"radius", o.radius}, {"velocity", vec_json(o.velocity)}});
  return {{"name", s.name},
          {"robot", {{"start", vec_json(s.robot.start)}, {"goal", vec_json(s.robot.goal)}, {"r", s.robot.r}}},
          {"obstacles", obs},
          {"params",
           {{"dt", s.params.dt},
            {"N", s.params.N},
            {"v_max", s.params.v_max},
            {"a_max", s.params.a_max},
            {"d_s", s.params.d_s},
            {"goal_tol", s.params.goal_tol},
            {"max_time", s.params.max_time}}},
          {"seed", s.seed}};
}

} // namespace geovo
