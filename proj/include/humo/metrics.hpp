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

#ifndef HUMO_METRICS_HPP_
#define HUMO_METRICS_HPP_

#include <string>
#include <utility>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"
#include "humo/tasks.hpp"
#include "humo/trajectory.hpp"

namespace humo {

/// T x K x 3 keypoint positions sampled at fixed dt.
struct KeypointStream {
  std::vector<Eigen::MatrixXd> positions;  // per step, K x 3
  double dt = 0.02;

  int steps() const { return static_cast<int>(positions.size()); }
  int keypoints() const { return positions.empty() ? 0 : static_cast<int>(positions[0].rows()); }
};

/// FK keypoint stream of a reference trajectory.
KeypointStream keypoint_stream(const RobotModel& model, const ReferenceTrajectory& traj);

enum class JerkStencil { kBackward, kCentral };

/// Mean absolute jerk: third finite difference of position, absolute values
/// summed over axes, averaged over every computed sample (streams, usable
/// steps, keypoints).
double mean_abs_jerk(const std::vector<KeypointStream>& streams,
                     JerkStencil stencil = JerkStencil::kBackward);

struct GaussianStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // symmetric PSD
};

/// Sample mean and unbiased covariance. Samples are accumulated in sorted
/// order so permutations of the input produce bitwise-identical stats.
GaussianStats fit_gaussian(const std::vector<Eigen::VectorXd>& features);

/// Squared Frechet distance between Gaussians:
/// ||mu1-mu2||^2 + Tr(S1 + S2 - 2 (S1 S2)^(1/2)).
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

/// Ids whose text contains every rule term, case-insensitive, input order
/// preserved.
std::vector<std::string> keyword_filter(
    const std::vector<std::pair<std::string, std::string>>& corpus,
    const std::vector<std::string>& rules);

/// Keyword rules for the tasks whose naturalness the toolkit scores.
std::vector<std::string> keyword_rules(Task task);

// Feature file: magic "HUMOFEAT", uint64 dim, uint64 count, then count*dim
// little-endian binary64 values, row-major.
void save_features(const std::vector<Eigen::VectorXd>& features, const std::string& path);
std::vector<Eigen::VectorXd> load_features(const std::string& path);

// Stream file: magic "HUMOKPST", uint64 steps, uint64 keypoints, binary64
// dt, then steps*keypoints*3 binary64 values.
void save_stream(const KeypointStream& stream, const std::string& path);
KeypointStream load_stream(const std::string& path);

}  // namespace humo

#endif  // HUMO_METRICS_HPP_
