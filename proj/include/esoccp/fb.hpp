#pragma once

#include "esoccp/esoclcp.hpp"

#include <vector>

namespace esoccp {

/// Fischer-Burmeister scalar: sqrt(a^2 + b^2) - (a + b).
/// Vanishes exactly when a >= 0, b >= 0 and a b = 0.
inline double fb_scalar(double a, double b) {
    return std::sqrt(a * a + b * b) - (a + b);
}

struct FbJacobian {
    Vector da, db; // FB diagonal entries, each in [-2, 0]
    Matrix full;   // (k+l+1) x (k+l+1) generalized Jacobian
};

/// Stacked FB residual of a MixCP at ztilde.
Vector fb_value(const MixcpInstance& prob, const Vector& ztilde);

/// Generalized Jacobian of the stacked system at ztilde.
FbJacobian fb_jacobian_at(const MixcpInstance& prob, const Vector& ztilde);

/// Stacked FB system for a MixCP: rows 1..k are fb_scalar(x~_i, F1_i),
/// the remaining l+1 rows are F2.  The origin rows of the generalized
/// Jacobian use the selection (a~, b~) = (-1, -1); rows with
/// sqrt(x_i^2 + f_i^2) < 1e-14 are treated as origin rows.
class FbSystem {
  public:
    explicit FbSystem(MixcpInstance prob) : prob_(std::move(prob)) {}

    const MixcpInstance& problem() const { return prob_; }
    int k() const { return prob_.k(); }
    int l() const { return prob_.l(); }
    int dim() const { return prob_.dim(); }

    Vector value(const Vector& ztilde) const { return fb_value(prob_, ztilde); }
    FbJacobian jacobian(const Vector& ztilde) const { return fb_jacobian_at(prob_, ztilde); }

    /// merit = 0.5 ||value||^2; gradient = A^T value with A = jacobian().full.
    double merit(const Vector& ztilde) const;
    Vector merit_gradient(const Vector& ztilde) const;

  private:
    MixcpInstance prob_;
};

/// Index sets over {0..k-1} used by the regularity analysis.
struct IndexPartition {
    std::vector<int> comp;  // complementarity: x_i >= 0, f_i >= 0, x_i f_i = 0
    std::vector<int> resid; // complement of comp
    std::vector<int> pos;   // residual with x_i > 0 and f_i > 0
    std::vector<int> neg;   // residual minus pos
    std::vector<int> alpha; // x_i = 0 < f_i
    std::vector<int> beta;  // x_i = 0 = f_i
    std::vector<int> gamma; // x_i > 0 = f_i
    std::vector<int> delta; // remainder
};

IndexPartition partition_indices(const FbSystem& sys, const Vector& ztilde, double tol = 1e-8);

} // namespace esoccp
