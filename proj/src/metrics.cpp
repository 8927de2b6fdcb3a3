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

#include "humo/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace humo {

KeypointStream keypoint_stream(const RobotModel& model, const ReferenceTrajectory& traj) {
  KeypointStream stream;
  stream.dt = traj.dt;
  stream.positions.reserve(traj.length());
  for (const Frame& f : traj.frames) {
    const auto poses =
        model.forward_kinematics(f.p_root, f.theta_root, model.expand_body(f.q));
    stream.positions.push_back(model.keypoint_positions(poses));
  }
  return stream;
}

double mean_abs_jerk(const std::vector<KeypointStream>& streams, JerkStencil stencil) {
  if (streams.empty()) throw std::invalid_argument("mean_abs_jerk: no streams");
  const double dt = streams[0].dt;
  double sum = 0.0;
  long long samples = 0;
  for (const KeypointStream& s : streams) {
    if (s.steps() < 4) {
      throw std::invalid_argument("mean_abs_jerk: streams need at least 4 steps");
    }
    if (std::abs(s.dt - dt) > 1e-12) {
      throw std::invalid_argument("mean_abs_jerk: inconsistent dt across streams");
    }
    const double dt3 = s.dt * s.dt * s.dt;
    const int K = s.keypoints();
    const int lo = stencil == JerkStencil::kBackward ? 3 : 2;
    const int hi = stencil == JerkStencil::kBackward ? s.steps() : s.steps() - 2;
    for (int t = lo; t < hi; ++t) {
      Eigen::MatrixXd jerk;
      if (stencil == JerkStencil::kBackward) {
        jerk = (s.positions[t] - 3.0 * s.positions[t - 1] + 3.0 * s.positions[t - 2] -
                s.positions[t - 3]) /
               dt3;
      } else {
        jerk = (s.positions[t + 2] - 2.0 * s.positions[t + 1] +
                2.0 * s.positions[t - 1] - s.positions[t - 2]) /
               (2.0 * dt3);
      }
      for (int k = 0; k < K; ++k) {
        sum += jerk.row(k).cwiseAbs().sum();
        ++samples;
      }
    }
  }
  // The denominator counts the jerk samples actually computed (the
  // differencing consumes the first/last steps).
  return sum / static_cast<double>(samples);
}

GaussianStats fit_gaussian(const std::vector<Eigen::VectorXd>& features) {
  if (features.size() < 2) {
    throw std::invalid_argument("fit_gaussian: needs at least 2 samples");
  }
  const int dim = static_cast<int>(features[0].size());
  for (const auto& f : features) {
    if (f.size() != dim) throw std::invalid_argument("fit_gaussian: ragged samples");
  }
  // Sort lexicographically so summation order is independent of input order.
  std::vector<const Eigen::VectorXd*> sorted;
  sorted.reserve(features.size());
  for (const auto& f : features) sorted.push_back(&f);
  std::sort(sorted.begin(), sorted.end(),
            [dim](const Eigen::VectorXd* a, const Eigen::VectorXd* b) {
              for (int i = 0; i < dim; ++i) {
                if ((*a)[i] != (*b)[i]) return (*a)[i] < (*b)[i];
              }
              return false;
            });

  GaussianStats stats;
  stats.mean = Eigen::VectorXd::Zero(dim);
  for (const auto* f : sorted) stats.mean += *f;
  stats.mean /= static_cast<double>(sorted.size());

  stats.covariance = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto* f : sorted) {
    const Eigen::VectorXd d = *f - stats.mean;
    stats.covariance += d * d.transpose();
  }
  stats.covariance /= static_cast<double>(sorted.size() - 1);
  stats.covariance = ((stats.covariance + stats.covariance.transpose()) / 2.0).eval();
  return stats;
}

namespace {

// Symmetric PSD square root with negative eigenvalues clamped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("frechet_distance: eigendecomposition failed (condition " +
                             std::to_string(m.norm()) + ")");
  }
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
  if (a.mean.size() != b.mean.size()) {
    throw std::invalid_argument("frechet_distance: dimension mismatch");
  }
  const Eigen::MatrixXd sqrt_a = psd_sqrt(a.covariance);
  // Tr((S1 S2)^1/2) = Tr((sqrt(S1) S2 sqrt(S1))^1/2), computed on the
  // symmetrized product.
  Eigen::MatrixXd inner = sqrt_a * b.covariance * sqrt_a;
  inner = ((inner + inner.transpose()) / 2.0).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("frechet_distance: matrix square root failed");
  }
  const double trace_sqrt = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double mean_term = (a.mean - b.mean).squaredNorm();
  const double d2 = mean_term + a.covariance.trace() + b.covariance.trace() -
                    2.0 * trace_sqrt;
  return std::max(d2, 0.0);
}

namespace {

std::string lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

}  // namespace

std::vector<std::string> keyword_filter(
    const std::vector<std::pair<std::string, std::string>>& corpus,
    const std::vector<std::string>& rules) {
  if (rules.empty()) throw std::invalid_argument("keyword_filter: empty rule");
  std::vector<std::string> terms;
  terms.reserve(rules.size());
  for (const std::string& r : rules) terms.push_back(lower(r));
  std::vector<std::string> out;
  for (const auto& [id, text] : corpus) {
    const std::string body = lower(text);
    bool all = true;
    for (const std::string& term : terms) {
      if (body.find(term) == std::string::npos) {
        all = false;
        break;
      }
    }
    if (all) out.push_back(id);
  }
  return out;
}

std::vector<std::string> keyword_rules(Task task) {
  switch (task) {
    case Task::kPick:
      return {"pick"};
    case Task::kPressButton:
      return {"press", "button"};
    case Task::kPrecisePunch:
      return {"punch"};
    case Task::kPreciseKick:
      return {"kick"};
    case Task::kJump:
      return {"jump"};
    default:
      throw std::invalid_argument("no keyword rule for task '" + task_id(task) + "'");
  }
}

namespace {

void write_u64(std::ofstream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::ifstream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  return v;
}

}  // namespace

void save_features(const std::vector<Eigen::VectorXd>& features, const std::string& path) {
  if (features.empty()) throw std::invalid_argument("save_features: empty set");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("save_features: cannot open '" + path + "'");
  out.write("HUMOFEAT", 8);
  write_u64(out, static_cast<std::uint64_t>(features[0].size()));
  write_u64(out, static_cast<std::uint64_t>(features.size()));
  for (const auto& f : features) {
    out.write(reinterpret_cast<const char*>(f.data()),
              static_cast<std::streamsize>(f.size() * sizeof(double)));
  }
}

std::vector<Eigen::VectorXd> load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_features: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "HUMOFEAT", 8) != 0) {
    throw std::invalid_argument("load_features: bad magic in '" + path + "'");
  }
  const std::uint64_t dim = read_u64(in);
  const std::uint64_t count = read_u64(in);
  std::vector<Eigen::VectorXd> features(count, Eigen::VectorXd(dim));
  for (auto& f : features) {
    in.read(reinterpret_cast<char*>(f.data()),
            static_cast<std::streamsize>(dim * sizeof(double)));
  }
  if (!in) throw std::invalid_argument("load_features: truncated file '" + path + "'");
  return features;
}

void save_stream(const KeypointStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("save_stream: cannot open '" + path + "'");
  out.write("HUMOKPST", 8);
  write_u64(out, static_cast<std::uint64_t>(stream.steps()));
  write_u64(out, static_cast<std::uint64_t>(stream.keypoints()));
  out.write(reinterpret_cast<const char*>(&stream.dt), sizeof(double));
  for (const auto& m : stream.positions) {
    for (int k = 0; k < m.rows(); ++k) {
      for (int c = 0; c < 3; ++c) {
        const double v = m(k, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
    }
  }
}

KeypointStream load_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_stream: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "HUMOKPST", 8) != 0) {
    throw std::invalid_argument("load_stream: bad magic in '" + path + "'");
  }
  const std::uint64_t steps = read_u64(in);
  const std::uint64_t keypoints = read_u64(in);
  KeypointStream stream;
  in.read(reinterpret_cast<char*>(&stream.dt), sizeof(double));
  stream.positions.assign(steps, Eigen::MatrixXd(keypoints, 3));
  for (auto& m : stream.positions) {
    for (std::uint64_t k = 0; k < keypoints; ++k) {
      for (int c = 0; c < 3; ++c) {
        double v;
        in.read(reinterpret_cast<char*>(&v), sizeof(double));
        m(k, c) = v;
      }
    }
  }
  if (!in) throw std::invalid_argument("load_stream: truncated file '" + path + "'");
  return stream;
}

}  // namespace humo
