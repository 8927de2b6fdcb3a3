// Copyright 2026 The humo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "humo/trajectory.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace humo {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;
constexpr double kIndexSnap = 1e-9;

void append_double(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void ReferenceTrajectory::validate() const {
  if (dt <= 0.0) throw std::invalid_argument("trajectory: dt must be positive");
  if (frames.size() < 2) throw std::invalid_argument("trajectory: needs at least 2 frames");
  if (t_g < 0.0 || t_g > duration() + 1e-12) {
    throw std::invalid_argument("trajectory: t_g outside [0, duration]");
  }
  for (size_t i = 0; i < frames.size(); ++i) {
    const Frame& f = frames[i];
    const std::string at = " at frame " + std::to_string(i);
    if (std::abs(f.theta_root.norm() - 1.0) > 1e-9) {
      throw std::invalid_argument("trajectory: root quaternion not unit norm" + at);
    }
    if (f.q.size() != frames[0].q.size()) {
      throw std::invalid_argument("trajectory: inconsistent joint count" + at);
    }
    if (!f.q.allFinite() || !f.p_root.allFinite()) {
      throw std::invalid_argument("trajectory: non-finite value" + at);
    }
    if ((f.s_left != 0 && f.s_left != 1) || (f.s_right != 0 && f.s_right != 1)) {
      throw std::invalid_argument("trajectory: hand state outside {0,1}" + at);
    }
  }
}

Frame interpolate_index(const ReferenceTrajectory& traj, double s) {
  const int last = traj.length() - 1;
  if (s < -kIndexSnap || s > last + kIndexSnap) {
    throw std::invalid_argument("interpolate: time outside trajectory");
  }
  double k_floor = std::floor(s);
  double u = s - k_floor;
  int k = static_cast<int>(k_floor);
  // Snap to knots so sampling at a frame returns that frame exactly.
  if (u < kIndexSnap) {
    u = 0.0;
  } else if (u > 1.0 - kIndexSnap) {
    u = 0.0;
    k += 1;
  }
  k = std::min(std::max(k, 0), last);
  if (u == 0.0) return traj.frames[k];

  const Frame& a = traj.frames[k];
  const Frame& b = traj.frames[k + 1];
  Frame out;
  out.p_root = (1.0 - u) * a.p_root + u * b.p_root;
  out.theta_root = slerp(a.theta_root, b.theta_root, u);
  out.q = (1.0 - u) * a.q + u * b.q;
  out.s_left = a.s_left;  // zero-order hold
  out.s_right = a.s_right;
  return out;
}

Frame interpolate(const ReferenceTrajectory& traj, double t) {
  return interpolate_index(traj, t / traj.dt);
}

ReferenceTrajectory slow_down(const ReferenceTrajectory& traj, double factor) {
  if (factor < 1.0) {
    throw std::invalid_argument("slow_down: factor must be >= 1");
  }
  const int out_len =
      static_cast<int>(std::floor((traj.length() - 1) * factor)) + 1;
  ReferenceTrajectory out;
  out.dt = traj.dt;
  out.task = traj.task;
  out.t_g = traj.t_g * factor;
  out.guidance_meta = traj.guidance_meta;
  out.frames.reserve(out_len);
  for (int i = 0; i < out_len; ++i) {
    out.frames.push_back(interpolate_index(traj, static_cast<double>(i) / factor));
  }
  return out;
}

ReferenceTrajectory prepend_init(const ReferenceTrajectory& traj,
                                 const Frame& init_frame, int n_init) {
  if (n_init < 0 || n_init % 2 != 0) {
    throw std::invalid_argument("prepend_init: n_init must be even and >= 0");
  }
  if (init_frame.q.size() != traj.frames[0].q.size()) {
    throw std::invalid_argument("prepend_init: joint count mismatch");
  }
  ReferenceTrajectory out;
  out.dt = traj.dt;
  out.task = traj.task;
  out.t_g = traj.t_g + n_init * traj.dt;
  out.guidance_meta = traj.guidance_meta;
  out.frames.reserve(traj.length() + n_init);
  const int half = n_init / 2;
  for (int i = 0; i < half; ++i) out.frames.push_back(init_frame);
  const Frame& first = traj.frames.front();
  for (int j = 0; j < half; ++j) {
    // Uniform ramp that lands exactly on the original first frame one step
    // after the last prepended frame.
    const double u = static_cast<double>(j + 1) / (half + 1);
    Frame f;
    f.p_root = (1.0 - u) * init_frame.p_root + u * first.p_root;
    f.theta_root = slerp(init_frame.theta_root, first.theta_root, u);
    f.q = (1.0 - u) * init_frame.q + u * first.q;
    f.s_left = init_frame.s_left;
    f.s_right = init_frame.s_right;
    out.frames.push_back(f);
  }
  out.frames.insert(out.frames.end(), traj.frames.begin(), traj.frames.end());
  return out;
}

ReferenceTrajectory freeze_group(const ReferenceTrajectory& traj,
                                 const RobotModel& model,
                                 const std::string& group) {
  const std::vector<int>& members = model.group(group);
  // Map full joint index -> position in the 27-long body vector.
  std::vector<int> body_pos(model.num_joints(), -1);
  const auto& body = model.body_joint_indices();
  for (size_t i = 0; i < body.size(); ++i) body_pos[body[i]] = static_cast<int>(i);

  ReferenceTrajectory out = traj;
  for (int j : members) {
    const int pos = body_pos[j];
    if (pos < 0) {
      throw std::invalid_argument("freeze_group: group '" + group +
                                  "' contains non-body joints");
    }
    const double def = model.joints()[j].default_angle;
    for (Frame& f : out.frames) f.q[pos] = def;
  }
  return out;
}

namespace {

json frame_to_json(const Frame& f) {
  json j;
  j["p_root"] = {f.p_root.x(), f.p_root.y(), f.p_root.z()};
  j["theta_root"] = {f.theta_root.w(), f.theta_root.x(), f.theta_root.y(),
                     f.theta_root.z()};
  j["q"] = std::vector<double>(f.q.data(), f.q.data() + f.q.size());
  j["s_left"] = f.s_left;
  j["s_right"] = f.s_right;
  return j;
}

Frame frame_from_json(const json& j, size_t index) {
  const std::string at = "frame " + std::to_string(index);
  for (const auto& item : j.items()) {
    if (item.key() != "p_root" && item.key() != "theta_root" && item.key() != "q" &&
        item.key() != "s_left" && item.key() != "s_right") {
      throw std::invalid_argument("trajectory file: unknown field '" + item.key() +
                                  "' in " + at);
    }
  }
  Frame f;
  const auto& p = j.at("p_root");
  const auto& th = j.at("theta_root");
  if (p.size() != 3 || th.size() != 4) {
    throw std::invalid_argument("trajectory file: bad vector size in " + at);
  }
  f.p_root = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
  f.theta_root = canonicalize(Quat(th[0].get<double>(), th[1].get<double>(),
                                   th[2].get<double>(), th[3].get<double>()));
  const auto& q = j.at("q");
  f.q.resize(q.size());
  for (size_t i = 0; i < q.size(); ++i) f.q[i] = q[i].get<double>();
  f.s_left = j.at("s_left").get<int>();
  f.s_right = j.at("s_right").get<int>();
  return f;
}

}  // namespace

std::string to_json_text(const ReferenceTrajectory& traj) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["dt"] = traj.dt;
  j["task"] = traj.task;
  j["t_g"] = traj.t_g;
  if (traj.guidance_meta) {
    const GuidanceMeta& m = *traj.guidance_meta;
    json meta;
    meta["prompt"] = m.prompt;
    meta["variant"] = m.variant;
    meta["seed"] = m.seed;
    json targets = json::array();
    for (const Vec3& p : m.p_targets) targets.push_back({p.x(), p.y(), p.z()});
    meta["p_targets"] = targets;
    meta["t_g_prime"] = m.t_g_prime;
    j["guidance_meta"] = meta;
  }
  json frames = json::array();
  for (const Frame& f : traj.frames) frames.push_back(frame_to_json(f));
  j["frames"] = frames;
  return j.dump(2);
}

ReferenceTrajectory from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("trajectory file: parse error: ") + e.what());
  }
  if (j.value("schema_version", -1) != kSchemaVersion) {
    throw std::invalid_argument("trajectory file: unsupported schema_version " +
                                std::to_string(j.value("schema_version", -1)));
  }
  ReferenceTrajectory traj;
  traj.dt = j.at("dt").get<double>();
  traj.task = j.at("task").get<std::string>();
  traj.t_g = j.at("t_g").get<double>();
  if (j.contains("guidance_meta")) {
    const json& meta = j.at("guidance_meta");
    GuidanceMeta m;
    m.prompt = meta.at("prompt").get<std::string>();
    m.variant = meta.at("variant").get<std::string>();
    m.seed = meta.at("seed").get<std::uint64_t>();
    for (const auto& p : meta.at("p_targets")) {
      m.p_targets.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    for (const auto& t : meta.at("t_g_prime")) m.t_g_prime.push_back(t.get<int>());
    traj.guidance_meta = std::move(m);
  }
  const json& frames = j.at("frames");
  traj.frames.reserve(frames.size());
  for (size_t i = 0; i < frames.size(); ++i) {
    traj.frames.push_back(frame_from_json(frames[i], i));
  }
  traj.validate();
  return traj;
}

void save(const ReferenceTrajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("save: cannot open '" + path + "'");
  out << to_json_text(traj) << "\n";
  if (!out) throw std::runtime_error("save: write failed for '" + path + "'");
}

ReferenceTrajectory load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string to_csv(const ReferenceTrajectory& traj, const RobotModel& model) {
  std::string out = "frame,t,root_x,root_y,root_z,quat_w,quat_x,quat_y,quat_z";
  for (int b : model.body_joint_indices()) {
    out += "," + model.joints()[b].name;
  }
  out += ",s_left,s_right\n";
  for (int i = 0; i < traj.length(); ++i) {
    const Frame& f = traj.frames[i];
    out += std::to_string(i);
    out += ",";
    append_double(out, i * traj.dt);
    const double root[7] = {f.p_root.x(),      f.p_root.y(),      f.p_root.z(),
                            f.theta_root.w(),  f.theta_root.x(),
                            f.theta_root.y(),  f.theta_root.z()};
    for (double v : root) {
      out += ",";
      append_double(out, v);
    }
    for (int k = 0; k < f.q.size(); ++k) {
      out += ",";
      append_double(out, f.q[k]);
    }
    out += "," + std::to_string(f.s_left) + "," + std::to_string(f.s_right) + "\n";
  }
  return out;
}

std::optional<int> hand_state_oscillation(const ReferenceTrajectory& traj) {
  for (int i = 1; i + 1 < traj.length(); ++i) {
    const Frame& prev = traj.frames[i - 1];
    const Frame& cur = traj.frames[i];
    const Frame& next = traj.frames[i + 1];
    if ((cur.s_left != prev.s_left && next.s_left == prev.s_left) ||
        (cur.s_right != prev.s_right && next.s_right == prev.s_right)) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace humo
