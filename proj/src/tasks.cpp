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

#include "humo/tasks.hpp"

#include <stdexcept>

namespace humo {

namespace {

struct TaskRow {
  Task task;
  const char* id;
  const char* label;
};

constexpr TaskRow kRows[] = {
    {Task::kPick, "pick", "Pick"},
    {Task::kPrecisePunch, "precise-punch", "Precise Punch"},
    {Task::kPreciseKick, "precise-kick", "Precise Kick"},
    {Task::kPressButton, "press-button", "Press Button"},
    {Task::kJump, "jump", "Jump"},
    {Task::kSit, "sit", "Sit"},
    {Task::kBimanualPick, "bimanual-pick", "Bimanual Pick"},
    {Task::kPickGroundSide, "pick-ground-side", "Pick from Ground (Side Grasp)"},
    {Task::kPickGroundTop, "pick-ground-top", "Pick from Ground (Top Grasp)"},
    {Task::kPickAndPlace, "pick-and-place", "Pick and Place"},
    {Task::kOpenDrawer, "open-drawer", "Open Drawer"},
    {Task::kOpenDoor, "open-door", "Open Door"},
    {Task::kSquat, "squat", "Squat"},
};

const TaskRow& row(Task task) {
  for (const TaskRow& r : kRows) {
    if (r.task == task) return r;
  }
  throw std::invalid_argument("unknown task enum value");
}

}  // namespace

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> kAll = {
      Task::kPick,          Task::kPrecisePunch,  Task::kPreciseKick,
      Task::kPressButton,   Task::kJump,          Task::kSit,
      Task::kBimanualPick,  Task::kPickGroundSide, Task::kPickGroundTop,
      Task::kPickAndPlace,  Task::kOpenDrawer,    Task::kOpenDoor,
      Task::kSquat};
  return kAll;
}

const std::vector<Task>& sim_tasks() {
  static const std::vector<Task> kSim = {
      Task::kPick,          Task::kPrecisePunch,  Task::kPreciseKick,
      Task::kPressButton,   Task::kJump,          Task::kSit,
      Task::kBimanualPick,  Task::kPickGroundSide, Task::kPickGroundTop,
      Task::kPickAndPlace,  Task::kOpenDrawer,    Task::kOpenDoor};
  return kSim;
}

const std::vector<Task>& real_tasks() {
  static const std::vector<Task> kReal = {
      Task::kPick, Task::kPrecisePunch, Task::kPressButton, Task::kBimanualPick,
      Task::kSquat};
  return kReal;
}

std::string task_id(Task task) { return row(task).id; }
std::string task_label(Task task) { return row(task).label; }

Task parse_task(const std::string& id) {
  for (const TaskRow& r : kRows) {
    if (id == r.id) return r.task;
  }
  throw std::invalid_argument("unknown task '" + id + "'");
}

std::string variant_id(Variant variant) {
  return variant == Variant::kSim ? "sim" : "real";
}

Variant parse_variant(const std::string& id) {
  if (id == "sim") return Variant::kSim;
  if (id == "real") return Variant::kReal;
  throw std::invalid_argument("unknown variant '" + id + "' (want sim|real)");
}

bool is_supported(Task task, Variant variant) {
  const auto& list = variant == Variant::kSim ? sim_tasks() : real_tasks();
  for (Task t : list) {
    if (t == task) return true;
  }
  return false;
}

HandScripts hand_scripts(Task task) {
  switch (task) {
    case Task::kPick:
    case Task::kPickAndPlace:
    case Task::kPickGroundTop:
    case Task::kOpenDrawer:
    case Task::kOpenDoor:
      return {HandScript::kAlwaysClosed, HandScript::kCloseAtTg};
    case Task::kPickGroundSide:
      return {HandScript::kCloseAtTg, HandScript::kAlwaysClosed};
    default:
      return {HandScript::kAlwaysClosed, HandScript::kAlwaysClosed};
  }
}

}  // namespace humo
