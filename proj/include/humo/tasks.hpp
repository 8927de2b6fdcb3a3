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

#ifndef HUMO_TASKS_HPP_
#define HUMO_TASKS_HPP_

#include <string>
#include <vector>

namespace humo {

enum class Task {
  kPick,
  kPrecisePunch,
  kPreciseKick,
  kPressButton,
  kJump,
  kSit,
  kBimanualPick,
  kPickGroundSide,
  kPickGroundTop,
  kPickAndPlace,
  kOpenDrawer,
  kOpenDoor,
  kSquat,  // hardware-only task
};

enum class Variant { kSim, kReal };

const std::vector<Task>& all_tasks();
const std::vector<Task>& sim_tasks();   // 12 entries
const std::vector<Task>& real_tasks();  // 5 entries

std::string task_id(Task task);          // e.g. "bimanual-pick"
std::string task_label(Task task);       // e.g. "Bimanual Pick"
Task parse_task(const std::string& id);  // throws on unknown id
std::string variant_id(Variant variant);
Variant parse_variant(const std::string& id);

bool is_supported(Task task, Variant variant);

/// How a hand's binary state evolves over a reference trajectory.
enum class HandScript { kAlwaysClosed, kAlwaysOpen, kCloseAtTg };

struct HandScripts {
  HandScript left = HandScript::kAlwaysClosed;
  HandScript right = HandScript::kAlwaysClosed;
};

/// Default hand-state labeling per task: the functional hand switches at the
/// first frame with t >= t_g, the other stays closed.
HandScripts hand_scripts(Task task);

}  // namespace humo

#endif  // HUMO_TASKS_HPP_
