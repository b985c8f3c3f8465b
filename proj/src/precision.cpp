#include "rgs/precision.hpp"

#include <string>

namespace rgs {

PrecisionPolicy parse_policy(std::string_view name) {
  if (name == "f32" || name == "unified32") return PrecisionPolicy::unified32();
  if (name == "f64" || name == "unified64") return PrecisionPolicy::unified64();
  if (name == "mixed" || name == "mixed32_64") return PrecisionPolicy::mixed();
  throw InvalidArgument("unknown precision policy '" + std::string(name) + "'");
}

std::string_view policy_name(PrecisionPolicy p) {
  switch (p.mode) {
    case Precision::Unified32: return "f32";
    case Precision::Unified64: return "f64";
    case Precision::Mixed32_64: return "mixed";
  }
  return "?";
}

double round_coarse(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("round_coarse: non-finite input");
  const float r = static_cast<float>(x);
  if (std::isinf(r)) throw OverflowError("round_coarse: binary32 overflow");
  return static_cast<double>(r);
}

Eigen::VectorXd gemv_coarse(const Eigen::MatrixXd& A, std::span<const double> x,
                            std::span<const double> y, double alpha, double beta) {
  const Index n = A.rows(), m = A.cols();
  if (static_cast<Index>(x.size()) != m || static_cast<Index>(y.size()) != n)
    throw DimensionError("gemv_coarse: dimension mismatch");

  const float a32 = static_cast<float>(round_coarse(alpha));
  const float b32 = static_cast<float>(round_coarse(beta));
  std::vector<float> acc(static_cast<std::size_t>(n), 0.0f);
  for (Index c = 0; c < m; ++c) {
    const float xc = static_cast<float>(round_coarse(x[c]));
    for (Index j = 0; j < n; ++j)
      acc[j] = acc[j] + static_cast<float>(A(j, c)) * xc;
  }
  Eigen::VectorXd out(n);
  for (Index j = 0; j < n; ++j) {
    const float by = b32 * static_cast<float>(y[j]);
    const float ax = a32 * acc[j];
    const float r = by + ax;
    if (!std::isfinite(r)) throw OverflowError("gemv_coarse: binary32 overflow");
    out[j] = r;
  }
  return out;
}

}  // namespace rgs
