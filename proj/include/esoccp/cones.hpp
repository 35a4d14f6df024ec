#pragma once

#include <Eigen/Dense>

namespace esoccp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ConeKind { NonnegOrthant, Lorentz, Esoc, DualEsoc };

/// A cone together with its dimensions.  Esoc(k, l) is the set
/// { (x,u) in R^k x R^l : x >= ||u|| e }; its dual DualEsoc(k, l) is
/// { (x,u) : e^T x >= ||u||, x >= 0 }.
struct ConeSpec {
    ConeKind kind;
    int k = 0; // orthant/Lorentz: ambient dimension; Esoc kinds: leading block
    int l = 0; // Esoc kinds: trailing block

    static ConeSpec orthant(int n);
    static ConeSpec lorentz(int n);
    static ConeSpec esoc(int k, int l);
    static ConeSpec dual_esoc(int k, int l);

    int dim() const { return k + l; }

    /// Dual cone (orthant and Lorentz are self-dual).
    ConeSpec dual() const;
};

struct MoreauParts {
    Vector plus;  // projection onto the Lorentz cone
    Vector minus; // projection of -x onto the dual (= same) cone
    Vector abs;   // plus + minus
};

/// Largest violation of the cone's defining inequalities at z; 0 inside.
double cone_violation(const ConeSpec& cone, const Vector& z);

/// Membership up to slack `tol` on each defining inequality.
bool contains(const ConeSpec& cone, const Vector& z, double tol = 1e-10);

/// Moreau decomposition of x with respect to the Lorentz cone.
/// x = plus - minus, <plus, minus> = 0, abs = plus + minus.
MoreauParts lorentz_moreau(const Vector& x);

/// max(violation of z in the cone, violation of w in the dual cone, |<z,w>|);
/// zero exactly when (z, w) lies in the complementarity set of the cone.
double complementarity_residual(const ConeSpec& cone, const Vector& z, const Vector& w);

} // namespace esoccp
