#pragma once

#include <Eigen/Dense>

namespace rf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Element of the truncated tensor algebra T^2(R^d): (scalar, vector, matrix).
struct TensorElement {
  double scalar = 0.0;
  Vec level1;
  Mat level2;

  static TensorElement zero(Eigen::Index d);
  Eigen::Index dim() const noexcept { return level1.size(); }
};

/// Point of the step-2 free nilpotent group G^2(R^d). The scalar part is
/// implicitly 1. Elements built by lifts satisfy the shuffle identity
/// level2 + level2^T == level1 level1^T.
struct GroupElement {
  Vec level1;
  Mat level2;

  static GroupElement identity(Eigen::Index d);
  Eigen::Index dim() const noexcept { return level1.size(); }
};

/// Truncated tensor product (Chen concatenation).
GroupElement group_mul(const GroupElement& a, const GroupElement& b);
GroupElement group_inverse(const GroupElement& g);

/// a^{-1} b, the increment between two points of a group-valued path.
GroupElement increment(const GroupElement& a, const GroupElement& b);

/// exp of a level-1 Lie element: (v, v v^T / 2).
GroupElement group_exp(const Vec& v);

/// exp of a Lie element (level-1 vector plus antisymmetric level-2 matrix).
/// The scalar part of `lie` must be 0.
GroupElement group_exp(const TensorElement& lie);

/// Inverse of group_exp on the group: (level1, level2 - level1 level1^T / 2).
TensorElement group_log(const GroupElement& g);

/// Dilation delta_lambda: level1 * lambda, level2 * lambda^2.
GroupElement dilate(const GroupElement& g, double lambda);

/// Antisymmetric part of the level-2 component (the Levy area).
Mat area(const GroupElement& g);

/// max(|level1|_2, sqrt(2 |antisym(level2)|_F)); a homogeneous norm
/// equivalent to the Carnot-Caratheodory norm.
double homogeneous_norm(const GroupElement& g);

/// homogeneous_norm(a^{-1} b).
double group_distance(const GroupElement& a, const GroupElement& b);

/// Largest entry of |level2 + level2^T - level1 level1^T|.
double geometric_defect(const GroupElement& g);

/// Name of the norm convention, echoed into every output record.
inline constexpr const char* kNormConvention =
    "homogeneous: max(|x1|_2, sqrt(2*|Anti(x2)|_F))";

}  // namespace rf
