#pragma once

#include "esoccp/cones.hpp"

#include <optional>

namespace esoccp {

/// Linear complementarity problem on the extended second order cone L(k,l):
/// find (x,u) in L with F(x,u) = T (x;u) + r in the dual cone M and
/// <(x,u), F(x,u)> = 0, where T = (A B; C D) and r = (p; q).
struct EsoclcpInstance {
    int k = 0;
    int l = 0;
    Matrix A, B, C, D;
    Vector p, q;

    // Condition estimates recorded at construction; the reformulation
    // requires nonsingular T, A and D, so near-singular blocks are flagged
    // (not rejected: classification and verification stay valid).
    double cond_T = 0.0, cond_A = 0.0, cond_D = 0.0;
    bool near_singular = false;

    EsoclcpInstance() = default;
    EsoclcpInstance(Matrix A_, Matrix B_, Matrix C_, Matrix D_, Vector p_, Vector q_);

    Matrix T() const;
    Vector r() const;

    /// F(x,u) = T (x;u) + r.
    Vector F(const Vector& x, const Vector& u) const;
};

/// Smooth mixed-complementarity reformulation in z~ = (x~, u, t):
///   F1(z~) = A(x~ + t e) + B u + p                          (k rows)
///   F2(z~) = ((tC + u e^T A)(x~ + t e) + u e^T(Bu + p) + t(Du + q); t^2 - ||u||^2)
/// with orthant complementarity between x~ and F1 and equality F2 = 0.
class MixcpInstance {
  public:
    explicit MixcpInstance(EsoclcpInstance inst);

    const EsoclcpInstance& source() const { return src_; }
    int k() const { return src_.k; }
    int l() const { return src_.l; }
    int dim() const { return src_.k + src_.l + 1; }

    Vector f1(const Vector& ztilde) const;
    Vector f2(const Vector& ztilde) const;

    /// Jacobian blocks at ztilde.  jac_f1 = [A, B, Ae]; jac_f2 = [C~, D~].
    Matrix jac_f1(const Vector& ztilde) const;
    Matrix jac_f2(const Vector& ztilde) const;

    Matrix b_tilde() const;                      // k x (l+1): [B, Ae]
    Matrix c_tilde(const Vector& ztilde) const;  // (l+1) x k
    Matrix d_tilde(const Vector& ztilde) const;  // (l+1) x (l+1)

  private:
    EsoclcpInstance src_;
    Vector Ae_;        // row sums of A
    Eigen::RowVectorXd colsum_A_, colsum_B_;
    double sum_p_ = 0.0;
};

enum class PairCase { I, II, III, IV, None };

struct PairClassification {
    PairCase c = PairCase::None;
    std::optional<double> lambda; // case IV: v = -lambda u with lambda > 0
};

/// Case split of the complementarity pair ((x,u), (y,v)) on L(k,l) by
/// whether u and v vanish.  `tol` is relative to the data magnitude.
PairClassification classify_pair(const Vector& x, const Vector& u, const Vector& y,
                                 const Vector& v, double tol = 1e-6);

MixcpInstance reformulate_vi(const EsoclcpInstance& inst);

/// The u = 0 test: x solves LCP(A, p, R^k_+) and e^T(Ax+p) >= ||Cx+q||.
struct ReformIReport {
    bool ok = false;
    double lcp_residual = 0.0; // complementarity residual of (x, Ax+p) on the orthant
    double norm_gap = 0.0;     // e^T(Ax+p) - ||Cx+q||
};
ReformIReport reformulate_i(const EsoclcpInstance& inst, const Vector& x);

/// Maps z~ = (x~, u, t) back to the original variables (x, u) = (x~ + t e, u).
/// Throws when t < -1e-12 (t stands for ||u||).
std::pair<Vector, Vector> back_map(const Vector& ztilde, int k, int l);

struct VerifyReport {
    bool in_L = false;
    bool in_M = false;
    double l_violation = 0.0;
    double m_violation = 0.0;
    double gap = 0.0; // |<(x,u), F(x,u)>|
    bool pass = false;
};

/// Re-checks a candidate against the original problem at tolerance `tol`.
VerifyReport verify_solution(const EsoclcpInstance& inst, const Vector& x,
                             const Vector& u, double tol = 1e-6);

} // namespace esoccp
