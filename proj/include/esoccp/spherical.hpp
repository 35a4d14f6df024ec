#pragma once

#include "esoccp/cones.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace esoccp {

/// Eigensystem of a symmetric matrix with a cluster rule for equal
/// eigenvalues: |li - lj| <= 1e-9 max(1, max|l|) counts as equal.
struct SpectralData {
    Matrix A;
    Vector eigenvalues;  // ascending
    Matrix eigenvectors; // orthonormal columns matching eigenvalues
    std::vector<int> cluster_of;        // cluster index per eigenvalue
    std::vector<double> distinct;       // ascending distinct values
    std::vector<int> multiplicity;      // per distinct value

    static SpectralData compute(const Matrix& A);

    int n() const { return static_cast<int>(eigenvalues.size()); }
    int distinct_count() const { return static_cast<int>(distinct.size()); }
    int smallest_multiplicity() const { return multiplicity.front(); }
    Vector v1() const { return eigenvectors.col(0); }
};

/// Off-diagonal entries all nonpositive (up to 1e-12).
bool z_matrix_test(const Matrix& A);

struct UndecidableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OrthantCopositivity {
    bool copositive = false;
    double min_value = 0.0; // min of x^T A x over the unit simplex
    Vector minimizer;
};

/// Exact copositivity on the nonnegative orthant by enumerating the KKT
/// support sets of min_{simplex} x^T A x (2^n - 1 bordered solves).
/// Throws UndecidableError for n > n_limit.
OrthantCopositivity orthant_copositive_detail(const Matrix& A, int n_limit = 12);
bool orthant_copositive(const Matrix& A, int n_limit = 12);

struct LorentzCopositivity {
    bool copositive = false;
    std::optional<double> rho; // witness: A - rho J is PSD
};

/// Lorentz-cone copositivity via the shifted-PSD characterization: searches
/// rho >= 0 with A - rho J positive semidefinite (J = diag(1,-1,...,-1)).
/// lambda_min(A - rho J) is concave in rho, so a section search locates the
/// feasible interval when it exists.
LorentzCopositivity lorentz_copositive(const Matrix& A);

/// Rayleigh quotient <Ax,x>/||x||^2 (x must be nonzero).
double rayleigh(const Matrix& A, const Vector& x);

/// Membership of x in the sublevel set { x in int(cone) : rayleigh <= c }.
bool sublevel_member(const Matrix& A, const ConeSpec& cone, const Vector& x, double c);

enum class Verdict { QuasiConvex, NotQuasiConvex, Undecided };
enum class CertificateKind {
    ConstantFunction,
    TwoEigenvalueCharacterization,
    CopositiveShift,
    SubdualSufficient,
};
const char* to_string(Verdict v);
const char* to_string(CertificateKind c);

/// Certified sublevel non-convexity: a0 and a1 lie in [rayleigh <= level]
/// strictly inside the cone while the chord midpoint does not, each with
/// margin at least `margin`.
struct Witness {
    Vector a0, a1;
    double level = 0.0;
    double margin = 0.0;
};

struct WitnessUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Constructive witness for spectra with at least two nonpositive directions
/// after a shift plus a positive one.  Throws WitnessUnavailable when the
/// pattern does not admit the construction.
Witness witness_construct(const SpectralData& spectral, const ConeSpec& cone);

struct SubdualEvidence {
    bool ok = false;
    enum class Condition { TwoEigenvalue, TailPattern, EigenvalueSpread } condition =
        Condition::TwoEigenvalue;
    double alpha = 0.0; // spread condition constant, when applicable
};
const char* to_string(SubdualEvidence::Condition c);

/// Sufficient conditions for quasi-convexity on a subdual (here self-dual)
/// cone, checked in order: the two-eigenvalue condition, the
/// (lambda, mu, ..., mu, eta) tail pattern, and the eigenvalue-spread bound
/// with the analytic alpha (orthant: (min component of v1)^2 for v1 > 0;
/// Lorentz: (v1_1 - ||v1 tail||)^2 / 2 for v1 interior).
SubdualEvidence subdual_sufficient(const SpectralData& spectral, const ConeSpec& cone);

struct QcVerdict {
    Verdict verdict = Verdict::Undecided;
    std::optional<CertificateKind> certificate;
    std::optional<double> rho; // Lorentz copositivity witness
    std::optional<Witness> witness;
    std::string diagnostics;
};

/// Decision cascade for spherical quasi-convexity of <Ax,x> on the cone-sphere
/// intersection; cone must be the nonnegative orthant or the Lorentz cone.
/// NotQuasiConvex verdicts always carry a re-verified witness; Undecided is
/// an honest outcome outside the characterized cases.
QcVerdict qc_analyze(const Matrix& A, const ConeSpec& cone);

/// Re-check a witness numerically (strict interior + margins).
bool witness_valid(const Matrix& A, const ConeSpec& cone, const Witness& w,
                   double min_margin = 1e-8);

/// Sampled sign-constancy diagnostic of <v1, .> over the W-cone
/// (L_{lambda2} union -L_{lambda2}) intersected with the cone interior.
std::string wcone_diagnostic(const SpectralData& spectral, const ConeSpec& cone, int samples = 100000,
                             std::uint64_t seed = 0x5eedULL);

} // namespace esoccp
