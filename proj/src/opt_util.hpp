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

// Internal helpers shared by the retarget and refine optimizers.

#ifndef HUMO_SRC_OPT_UTIL_HPP_
#define HUMO_SRC_OPT_UTIL_HPP_

#include <cmath>
#include <functional>
#include <vector>

#include "humo/math.hpp"
#include "humo/model.hpp"

namespace humo::opt {

struct GdOptions {
  int max_iterations = 300;
  double initial_step = 0.05;
  double tolerance = 1e-12;  // stop when the accepted improvement drops below
  int max_backtracks = 40;
  double grow = 1.5;
  double max_step = 1.0;
};

struct GdResult {
  Eigen::VectorXd x;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> accepted_losses;  // non-increasing by construction
};

// Projected gradient descent with backtracking; a step is accepted only if
// the projected candidate strictly decreases the loss.
inline GdResult gradient_descent(
    const Eigen::VectorXd& x0,
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& loss_grad,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& project,
    const GdOptions& opts) {
  GdResult res;
  res.x = project(x0);
  Eigen::VectorXd grad;
  double f = loss_grad(res.x, &grad);
  res.accepted_losses.push_back(f);
  double step = opts.initial_step;
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    if (!std::isfinite(f)) break;
    const double gnorm = grad.norm();
    if (gnorm == 0.0) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    double trial = step;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      const Eigen::VectorXd cand = project(res.x - trial * grad);
      Eigen::VectorXd cand_grad;
      const double fc = loss_grad(cand, &cand_grad);
      if (std::isfinite(fc) && fc < f) {
        const double improvement = f - fc;
        res.x = cand;
        f = fc;
        grad = std::move(cand_grad);
        res.accepted_losses.push_back(f);
        step = std::min(trial * opts.grow, opts.max_step);
        accepted = true;
        if (improvement < opts.tolerance) {
          res.converged = true;
        }
        break;
      }
      trial *= 0.5;
    }
    if (!accepted || res.converged) {
      res.converged = true;
      break;
    }
  }
  res.loss = f;
  return res;
}

// d(point)/d(root rotation vector) for a point at root-frame offset c:
// p = t + exp(theta) c  =>  dp/dtheta = -R skew(c) Jr(theta).
inline Eigen::Matrix3d point_wrt_rotvec(const Eigen::Matrix3d& rot,
                                        const Eigen::Matrix3d& right_jac,
                                        const Vec3& c) {
  return -rot * so3::skew(c) * right_jac;
}

// Restrict a 3 x num_joints Jacobian to the 27 body columns.
inline Eigen::MatrixXd body_columns(const RobotModel& model,
                                    const Eigen::MatrixXd& jac) {
  const auto& idx = model.body_joint_indices();
  Eigen::MatrixXd out(3, idx.size());
  for (size_t i = 0; i < idx.size(); ++i) out.col(i) = jac.col(idx[i]);
  return out;
}

// d(v_world)/dq for a direction vector rigidly attached to `link`:
// each revolute ancestor joint j contributes axis_j x v.
inline Eigen::MatrixXd direction_jacobian(const RobotModel& model,
                                          const std::vector<LinkPose>& poses,
                                          int link, const Vec3& v_world) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(3, model.num_joints());
  int cur = link;
  while (cur >= 0) {
    const LinkSpec& spec = model.links()[cur];
    if (spec.joint >= 0) {
      const Vec3 axis = poses[cur].orientation * model.joints()[spec.joint].axis;
      jac.col(spec.joint) = axis.cross(v_world);
    }
    cur = spec.parent;
  }
  return jac;
}

}  // namespace humo::opt

#endif  // HUMO_SRC_OPT_UTIL_HPP_
