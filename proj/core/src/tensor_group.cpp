#include "roughfilter/tensor_group.hpp"

#include <cmath>

#include "roughfilter/errors.hpp"

namespace rf {

namespace {

void check_same_dim(const GroupElement& a, const GroupElement& b) {
  if (a.dim() != b.dim())
    throw ValidationError("group elements of different dimension: " +
                          std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
}

}  // namespace

TensorElement TensorElement::zero(Eigen::Index d) {
  return {0.0, Vec::Zero(d), Mat::Zero(d, d)};
}

GroupElement GroupElement::identity(Eigen::Index d) {
  return {Vec::Zero(d), Mat::Zero(d, d)};
}

GroupElement group_mul(const GroupElement& a, const GroupElement& b) {
  check_same_dim(a, b);
  GroupElement out;
  out.level1 = a.level1 + b.level1;
  out.level2 = a.level2 + b.level2;
  out.level2.noalias() += a.level1 * b.level1.transpose();
  return out;
}

GroupElement group_inverse(const GroupElement& g) {
  GroupElement out;
  out.level1 = -g.level1;
  out.level2 = -g.level2;
  out.level2.noalias() += g.level1 * g.level1.transpose();
  return out;
}

GroupElement increment(const GroupElement& a, const GroupElement& b) {
  check_same_dim(a, b);
  // (-a1, -A + a1 a1^T) * (b1, B) = (b1 - a1, B - A - a1 (b1 - a1)^T)
  GroupElement out;
  out.level1 = b.level1 - a.level1;
  out.level2 = b.level2 - a.level2;
  out.level2.noalias() -= a.level1 * out.level1.transpose();
  return out;
}

GroupElement group_exp(const Vec& v) {
  GroupElement out;
  out.level1 = v;
  out.level2 = 0.5 * v * v.transpose();
  return out;
}

GroupElement group_exp(const TensorElement& lie) {
  if (lie.level2.rows() != lie.dim() || lie.level2.cols() != lie.dim())
    throw ValidationError("tensor element level2 has wrong shape");
  if (lie.scalar != 0.0) throw ValidationError("exp needs a Lie element (scalar part 0)");
  GroupElement out;
  out.level1 = lie.level1;
  out.level2 = lie.level2 + 0.5 * lie.level1 * lie.level1.transpose();
  return out;
}

TensorElement group_log(const GroupElement& g) {
  TensorElement out;
  out.scalar = 0.0;
  out.level1 = g.level1;
  out.level2 = g.level2 - 0.5 * g.level1 * g.level1.transpose();
  return out;
}

GroupElement dilate(const GroupElement& g, double lambda) {
  return {lambda * g.level1, lambda * lambda * g.level2};
}

Mat area(const GroupElement& g) { return 0.5 * (g.level2 - g.level2.transpose()); }

double homogeneous_norm(const GroupElement& g) {
  const double l1 = g.level1.norm();
  const double l2 = std::sqrt(2.0 * area(g).norm());
  return std::max(l1, l2);
}

double group_distance(const GroupElement& a, const GroupElement& b) {
  return homogeneous_norm(increment(a, b));
}

double geometric_defect(const GroupElement& g) {
  return (g.level2 + g.level2.transpose() - g.level1 * g.level1.transpose())
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace rf
