#include "esoccp/spherical.hpp"

#include "esoccp/rng.hpp"

#include <sstream>

namespace esoccp {

namespace {

constexpr double kMemberTol = 1e-10;

bool is_diagonal(const Matrix& A, double tol = 1e-12) {
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (i != j && std::abs(A(i, j)) > tol) return false;
    return true;
}

void require_symmetric(const Matrix& A, const char* who) {
    if (A.rows() != A.cols() || (A - A.transpose()).cwiseAbs().maxCoeff() >
                                    1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff()))
        throw std::invalid_argument(std::string(who) + ": matrix must be symmetric");
}

// Distance of x to the cone boundary along the defining inequalities
// (positive strictly inside).
double interior_margin(const ConeSpec& cone, const Vector& x) {
    switch (cone.kind) {
        case ConeKind::NonnegOrthant: return x.minCoeff();
        case ConeKind::Lorentz: return x(0) - x.tail(x.size() - 1).norm();
        default: throw std::invalid_argument("interior_margin: orthant or Lorentz only");
    }
}

Vector interior_direction(const ConeSpec& cone) {
    Vector d = Vector::Zero(cone.dim());
    if (cone.kind == ConeKind::NonnegOrthant) d.setOnes();
    else d(0) = 1.0;
    return d;
}

// A deterministic interior sample (unit-ish scale).
Vector interior_sample(const ConeSpec& cone, std::uint64_t key) {
    const int n = cone.dim();
    Vector x(n);
    if (cone.kind == ConeKind::NonnegOrthant) {
        for (int i = 0; i < n; ++i)
            x(i) = 0.05 + 0.95 * rng::uniform01(rng::mix(key, static_cast<std::uint64_t>(i)));
        return x;
    }
    Vector d(n - 1);
    for (int i = 0; i + 1 < n; ++i)
        d(i) = rng::normal(rng::mix(key, static_cast<std::uint64_t>(i)));
    if (d.norm() == 0.0) d(0) = 1.0;
    d *= (0.9 * rng::uniform01(rng::mix(key, 1234u))) / d.norm();
    x(0) = 1.0;
    x.tail(n - 1) = d;
    return x;
}

} // namespace

SpectralData SpectralData::compute(const Matrix& A) {
    require_symmetric(A, "SpectralData");
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    if (es.info() != Eigen::Success) throw std::runtime_error("SpectralData: eigensolver failed");

    SpectralData sd;
    sd.A = A;
    sd.eigenvalues = es.eigenvalues();
    sd.eigenvectors = es.eigenvectors();
    const double eq_tol = 1e-9 * std::max(1.0, sd.eigenvalues.cwiseAbs().maxCoeff());
    sd.cluster_of.resize(static_cast<std::size_t>(sd.n()));
    for (int i = 0; i < sd.n(); ++i) {
        if (i == 0 || sd.eigenvalues(i) - sd.distinct.back() > eq_tol) {
            sd.distinct.push_back(sd.eigenvalues(i));
            sd.multiplicity.push_back(0);
        }
        sd.cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(sd.distinct.size()) - 1;
        ++sd.multiplicity.back();
    }
    return sd;
}

bool z_matrix_test(const Matrix& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("z_matrix_test: matrix must be square");
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (i != j && A(i, j) > 1e-12) return false;
    return true;
}

OrthantCopositivity orthant_copositive_detail(const Matrix& A, int n_limit) {
    require_symmetric(A, "orthant_copositive");
    const int n = static_cast<int>(A.rows());
    if (n > n_limit)
        throw UndecidableError("orthant_copositive: support enumeration limited to n <= " +
                               std::to_string(n_limit));

    OrthantCopositivity out;
    out.min_value = std::numeric_limits<double>::infinity();
    std::vector<int> idx;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        idx.clear();
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) idx.push_back(i);
        const int s = static_cast<int>(idx.size());

        // KKT system of min x^T A x over the face simplex with support idx:
        // 2 A_SS x = m e, e^T x = 1; objective value m / 2.
        Matrix sys = Matrix::Zero(s + 1, s + 1);
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) sys(a, b) = 2.0 * A(idx[a], idx[b]);
        sys.col(s).head(s).setConstant(-1.0);
        sys.row(s).head(s).setOnes();
        Vector rhs = Vector::Zero(s + 1);
        rhs(s) = 1.0;

        Eigen::FullPivLU<Matrix> lu(sys);
        lu.setThreshold(1e-12);
        if (!lu.isInvertible()) continue; // the face optimum then lives on a sub-face
        const Vector sol = lu.solve(rhs);
        if (sol.head(s).minCoeff() < -1e-10) continue;
        double value = 0.0;
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) value += sol(a) * A(idx[a], idx[b]) * sol(b);
        if (value < out.min_value) {
            out.min_value = value;
            out.minimizer = Vector::Zero(n);
            for (int a = 0; a < s; ++a) out.minimizer(idx[a]) = std::max(0.0, sol(a));
        }
    }
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    out.copositive = out.min_value >= -1e-10 * scale;
    return out;
}

bool orthant_copositive(const Matrix& A, int n_limit) {
    return orthant_copositive_detail(A, n_limit).copositive;
}

LorentzCopositivity lorentz_copositive(const Matrix& A) {
    require_symmetric(A, "lorentz_copositive");
    const int n = static_cast<int>(A.rows());
    Vector jd = -Vector::Ones(n);
    jd(0) = 1.0;

    const auto lam_min = [&](double rho) {
        Matrix M = A;
        M -= rho * Matrix(jd.asDiagonal());
        return Eigen::SelfAdjointEigenSolver<Matrix>(M).eigenvalues()(0);
    };

    // lambda_min(A - rho J) is concave in rho; golden-section maximization
    // over [0, 2||A||] locates the feasible interval of the shifted-PSD test.
    double lo = 0.0, hi = 2.0 * A.norm() + 1.0;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = lam_min(x1), f2 = lam_min(x2);
    for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + gr * (hi - lo); f2 = lam_min(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - gr * (hi - lo); f1 = lam_min(x1);
        }
    }
    const double rho_star = 0.5 * (lo + hi);
    const double best = std::max({lam_min(rho_star), lam_min(0.0)});
    LorentzCopositivity out;
    if (best >= -1e-10 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
        out.copositive = true;
        out.rho = lam_min(0.0) >= best ? 0.0 : rho_star;
    }
    return out;
}

double rayleigh(const Matrix& A, const Vector& x) {
    const double nn = x.squaredNorm();
    if (nn == 0.0) throw std::invalid_argument("rayleigh: x must be nonzero");
    return x.dot(A * x) / nn;
}

bool sublevel_member(const Matrix& A, const ConeSpec& cone, const Vector& x, double c) {
    if (x.size() != cone.dim()) throw std::invalid_argument("sublevel_member: bad dimension");
    return interior_margin(cone, x) > 0.0 && rayleigh(A, x) <= c;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::QuasiConvex: return "quasi-convex";
        case Verdict::NotQuasiConvex: return "not-quasi-convex";
        case Verdict::Undecided: return "undecided";
    }
    return "?";
}

const char* to_string(CertificateKind c) {
    switch (c) {
        case CertificateKind::ConstantFunction: return "constant-function";
        case CertificateKind::TwoEigenvalueCharacterization:
            return "two-eigenvalue-characterization";
        case CertificateKind::CopositiveShift: return "copositive-shift";
        case CertificateKind::SubdualSufficient: return "subdual-sufficient";
    }
    return "?";
}

const char* to_string(SubdualEvidence::Condition c) {
    switch (c) {
        case SubdualEvidence::Condition::TwoEigenvalue: return "two-eigenvalue";
        case SubdualEvidence::Condition::TailPattern: return "tail-pattern";
        case SubdualEvidence::Condition::EigenvalueSpread: return "eigenvalue-spread";
    }
    return "?";
}

bool witness_valid(const Matrix& A, const ConeSpec& cone, const Witness& w, double min_margin) {
    if (w.margin < min_margin) return false;
    const Vector mid = 0.5 * (w.a0 + w.a1);
    if (interior_margin(cone, w.a0) < min_margin || interior_margin(cone, w.a1) < min_margin ||
        interior_margin(cone, mid) < min_margin)
        return false;
    return rayleigh(A, w.a0) <= w.level - min_margin &&
           rayleigh(A, w.a1) <= w.level - min_margin &&
           rayleigh(A, mid) >= w.level + min_margin;
}

namespace {

// Packages two points with equal-ish sublevel values and a violating chord
// midpoint into a Witness by centering the level between them.
std::optional<Witness> package_witness(const Matrix& A, const ConeSpec& cone, const Vector& a0,
                                       const Vector& a1) {
    const Vector mid = 0.5 * (a0 + a1);
    if (mid.squaredNorm() == 0.0) return std::nullopt;
    const double lo = std::max(rayleigh(A, a0), rayleigh(A, a1));
    const double hi = rayleigh(A, mid);
    if (hi - lo < 4e-8) return std::nullopt;
    Witness w;
    w.a0 = a0;
    w.a1 = a1;
    w.level = 0.5 * (lo + hi);
    w.margin = 0.5 * (hi - lo);
    if (!witness_valid(A, cone, w)) return std::nullopt;
    return w;
}

// Witness from a complementary pair of orthonormal directions with
// <A x, y> > 0: the quadratic along the great circle through x and y peaks
// strictly between them, so two nearby circle points and their chord
// midpoint separate a sublevel set.  Points are nudged into the interior.
std::optional<Witness> pair_witness(const Matrix& A, const ConeSpec& cone, const Vector& x,
                                    const Vector& y) {
    const double qx = x.dot(A * x), qy = y.dot(A * y), qxy = x.dot(A * y);
    if (qxy <= 0.0) return std::nullopt;
    const double hd = 0.5 * (qx - qy);
    const double phi = std::atan2(qxy, hd); // in (0, pi)
    const double s_star = 0.5 * phi;
    const double h = std::min({s_star, M_PI / 2.0 - s_star, M_PI / 8.0}) * 0.9;
    if (h <= 0.0) return std::nullopt;

    const auto point = [&](double s) { return Vector(std::cos(s) * x + std::sin(s) * y); };
    const Vector dir = interior_direction(cone);
    for (double delta = 1e-2; delta >= 1e-7; delta *= 0.5) {
        const Vector a0 = point(s_star - h) + delta * dir;
        const Vector a1 = point(s_star + h) + delta * dir;
        if (auto w = package_witness(A, cone, a0, a1)) return w;
    }
    return std::nullopt;
}

std::optional<Witness> diagonal_witness(const SpectralData& spectral, const ConeSpec& cone) {
    if (cone.kind != ConeKind::NonnegOrthant || !is_diagonal(spectral.A)) return std::nullopt;
    const int n = spectral.n();
    const Vector diag = spectral.A.diagonal();

    // Canonical indices: two below the shift, one above.
    double c;
    if (spectral.smallest_multiplicity() >= 2) {
        if (spectral.distinct_count() < 2) return std::nullopt;
        c = 0.5 * (spectral.distinct[0] + spectral.distinct[1]);
    } else {
        if (spectral.distinct_count() < 3) return std::nullopt;
        c = 0.5 * (spectral.distinct[1] + spectral.distinct[2]);
    }
    int ia = -1, ib = -1, id = -1;
    double low1 = std::numeric_limits<double>::infinity(),
           low2 = std::numeric_limits<double>::infinity(), high = -low1;
    for (int i = 0; i < n; ++i) {
        if (diag(i) < c) {
            if (diag(i) < low1) { low2 = low1; ib = ia; low1 = diag(i); ia = i; }
            else if (diag(i) < low2) { low2 = diag(i); ib = i; }
        } else if (diag(i) > c && diag(i) > high) {
            high = diag(i);
            id = i;
        }
    }
    if (ia < 0 || ib < 0 || id < 0) return std::nullopt;

    const double t1 = std::sqrt((c - diag(ia)) / (diag(id) - c));
    const double t2 = std::sqrt((c - diag(ib)) / (diag(id) - c));
    Vector a0 = Vector::Zero(n), a1 = Vector::Zero(n);
    a0(ia) = 1.0; a0(id) = t1;
    a1(ib) = 1.0; a1(id) = t2;
    for (double delta = 1e-2; delta >= 1e-7; delta *= 0.5) {
        const Vector w0 = a0 + Vector::Constant(n, delta);
        const Vector w1 = a1 + Vector::Constant(n, delta);
        if (auto w = package_witness(spectral.A, cone, w0, w1)) return w;
    }
    return std::nullopt;
}

// General construction: pick a level c crossed by the Rayleigh quotient
// inside the cone with at least two eigenvalues below c, locate an interior
// zero of <(A - cI)x, x> on a segment, and bend it along the negative
// eigenspace so the chord midpoint leaves the sublevel set.
std::optional<Witness> interior_witness(const SpectralData& spectral, const ConeSpec& cone) {
    const Matrix& A = spectral.A;
    const int n = spectral.n();

    // Interior candidates for the low and high side of the level.
    std::vector<Vector> pool;
    pool.push_back(interior_direction(cone) + 0.05 * Vector::Ones(n));
    if (cone.kind == ConeKind::NonnegOrthant) {
        for (int i = 0; i < n; ++i) {
            Vector e = Vector::Constant(n, 1e-3);
            e(i) = 1.0;
            pool.push_back(e);
        }
    } else {
        for (int i = 1; i < n; ++i) {
            Vector x = Vector::Zero(n);
            x(0) = 1.0;
            x(i) = 0.9;
            pool.push_back(x);
            x(i) = -0.9;
            pool.push_back(x);
        }
    }
    for (int s = 0; s < 4096; ++s)
        pool.push_back(interior_sample(cone, rng::mix(0xace5u, static_cast<std::uint64_t>(s))));

    double phi_lo = std::numeric_limits<double>::infinity(), phi_hi = -phi_lo;
    Vector u_lo, u_hi;
    for (const auto& x : pool) {
        if (interior_margin(cone, x) <= 1e-9) continue;
        const double v = rayleigh(A, x);
        if (v < phi_lo) { phi_lo = v; u_lo = x; }
        if (v > phi_hi) { phi_hi = v; u_hi = x; }
    }
    if (!u_lo.size() || !u_hi.size()) return std::nullopt;

    const double lo_req = spectral.smallest_multiplicity() >= 2
                              ? spectral.distinct[0]
                              : (spectral.distinct_count() >= 2 ? spectral.distinct[1] : phi_hi);
    const double c_lo = std::max(lo_req, phi_lo), c_hi = std::min(spectral.distinct.back(), phi_hi);
    if (!(c_hi - c_lo > 1e-9)) return std::nullopt;
    const double c = 0.5 * (c_lo + c_hi);

    // Bisect the segment [u_lo, u_hi] for an interior zero of the shifted form.
    const auto g = [&](const Vector& x) { return x.dot(A * x) - c * x.squaredNorm(); };
    if (!(g(u_lo) < 0.0 && g(u_hi) > 0.0)) return std::nullopt;
    Vector a = u_lo, b = u_hi;
    for (int it = 0; it < 200; ++it) {
        const Vector mid = 0.5 * (a + b);
        (g(mid) < 0.0 ? a : b) = mid;
    }
    const Vector xbar = 0.5 * (a + b);

    // Negative eigenspace of A - cI.
    std::vector<int> neg;
    for (int i = 0; i < n; ++i)
        if (spectral.eigenvalues(i) < c) neg.push_back(i);
    if (neg.size() < 2) return std::nullopt;

    const Vector ybar = A * xbar - c * xbar;
    if (ybar.norm() < 1e-12) return std::nullopt;

    // b_dir: the component of ybar inside the negative eigenspace (nonzero by
    // the zero-crossing argument); a_dir: a negative-eigenspace direction
    // orthogonal to it.
    Vector yN = Vector::Zero(n);
    for (int i : neg) yN += spectral.eigenvectors.col(i).dot(ybar) * spectral.eigenvectors.col(i);
    if (yN.norm() < 1e-12) return std::nullopt;
    const Vector b_dir = yN / yN.norm();
    Vector a_dir;
    for (int i : neg) {
        Vector cand = spectral.eigenvectors.col(i) - spectral.eigenvectors.col(i).dot(b_dir) * b_dir;
        if (cand.norm() > 1e-8) { a_dir = cand / cand.norm(); break; }
    }
    if (!a_dir.size()) return std::nullopt;

    for (double eps = 1.0; eps >= 1e-5; eps *= 0.5) {
        Vector ae = a_dir + eps * b_dir;
        ae /= ae.norm();
        const double quad = ae.dot(A * ae) - c * ae.squaredNorm(); // < 0 on the eigenspace
        if (quad >= 0.0) continue;
        const double t = -2.0 * ae.dot(ybar) / quad;
        const Vector p = xbar + t * ae;
        if (auto w = package_witness(A, cone, xbar, p)) return w;
    }
    return std::nullopt;
}

} // namespace

Witness witness_construct(const SpectralData& spectral, const ConeSpec& cone) {
    if (spectral.distinct_count() < 2)
        throw WitnessUnavailable("witness_construct: the quadratic is constant");
    if (spectral.smallest_multiplicity() == 1 && spectral.distinct_count() == 2)
        throw WitnessUnavailable("witness_construct: no admissible shift between two simple "
                                 "clusters");
    if (auto w = diagonal_witness(spectral, cone)) return *w;
    if (auto w = interior_witness(spectral, cone)) return *w;
    throw WitnessUnavailable("witness_construct: construction did not verify numerically");
}

SubdualEvidence subdual_sufficient(const SpectralData& spectral, const ConeSpec& cone) {
    SubdualEvidence ev;
    const int n = spectral.n();
    const Vector v1 = spectral.v1();
    const auto in_dual = [&](const Vector& v) {
        return contains(cone, v, kMemberTol) || contains(cone, Vector(-v), kMemberTol);
    };

    if (spectral.distinct_count() == 2 && spectral.smallest_multiplicity() == 1 && in_dual(v1)) {
        ev.ok = true;
        ev.condition = SubdualEvidence::Condition::TwoEigenvalue;
        return ev;
    }

    if (spectral.distinct_count() == 3 && spectral.smallest_multiplicity() == 1 &&
        spectral.multiplicity[1] == n - 2 && spectral.multiplicity[2] == 1) {
        const double lam = spectral.distinct[0], mu = spectral.distinct[1], eta = spectral.distinct[2];
        const double factor = std::sqrt((eta - mu) / (mu - lam));
        const Vector vn = spectral.eigenvectors.col(n - 1);
        const Vector abs_vn = cone.kind == ConeKind::NonnegOrthant
                                  ? Vector(vn.cwiseAbs())
                                  : lorentz_moreau(vn).abs;
        if (contains(cone, Vector(v1 - factor * abs_vn), kMemberTol) ||
            contains(cone, Vector(-v1 - factor * abs_vn), kMemberTol)) {
            ev.ok = true;
            ev.condition = SubdualEvidence::Condition::TailPattern;
            return ev;
        }
    }

    if (spectral.smallest_multiplicity() == 1 && n >= 3) {
        double alpha = 0.0;
        for (int sign = 0; sign < 2; ++sign) {
            const Vector v = sign ? Vector(-v1) : v1;
            if (cone.kind == ConeKind::NonnegOrthant) {
                if (v.minCoeff() > 0.0) alpha = v.minCoeff() * v.minCoeff();
            } else {
                const double gap = v(0) - v.tail(n - 1).norm();
                if (gap > 0.0) alpha = 0.5 * gap * gap;
            }
            if (alpha > 0.0) break;
        }
        if (alpha > 0.0) {
            const double l1 = spectral.eigenvalues(0), l2 = spectral.eigenvalues(1),
                         ln = spectral.eigenvalues(n - 1);
            if (ln <= l2 + alpha * (l2 - l1) + 1e-12) {
                ev.ok = true;
                ev.condition = SubdualEvidence::Condition::EigenvalueSpread;
                ev.alpha = alpha;
                return ev;
            }
            ev.alpha = alpha;
        }
    }
    return ev;
}

std::string wcone_diagnostic(const SpectralData& spectral, const ConeSpec& cone, int samples,
                             std::uint64_t seed) {
    if (spectral.smallest_multiplicity() != 1 || spectral.distinct_count() < 2)
        return "w-cone: not applicable (smallest eigenvalue not simple)";
    const int n = spectral.n();
    const double l1 = spectral.eigenvalues(0), l2 = spectral.eigenvalues(1);
    Vector theta(n);
    for (int i = 0; i < n; ++i) theta(i) = (spectral.eigenvalues(i) - l2) / (l2 - l1);

    long pos = 0, neg = 0, in_w = 0;
    for (int s = 0; s < samples; ++s) {
        const Vector x = interior_sample(cone, rng::mix(seed, static_cast<std::uint64_t>(s)));
        double lhs = spectral.eigenvectors.col(0).dot(x);
        double rhs = 0.0;
        for (int i = 1; i < n; ++i) {
            const double proj = spectral.eigenvectors.col(i).dot(x);
            rhs += theta(i) * proj * proj;
        }
        if (lhs * lhs >= rhs) {
            ++in_w;
            if (lhs > 0) ++pos;
            if (lhs < 0) ++neg;
        }
    }
    std::ostringstream os;
    os << "w-cone samples: " << in_w << "/" << samples << " in W, <v1,.> signs +" << pos << "/-"
       << neg
       << (pos == 0 || neg == 0 ? " (sign-constant: consistent with v1 in W* or -W*)"
                                : " (mixed: v1 outside W* and -W*)");
    return os.str();
}

namespace {

std::optional<Witness> not_z_witness(const Matrix& A, const ConeSpec& cone) {
    const int n = static_cast<int>(A.rows());
    // Largest positive off-diagonal entry gives the violating canonical pair.
    int bi = -1, bj = -1;
    double best = 1e-12;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && A(i, j) > best) { best = A(i, j); bi = i; bj = j; }
    if (bi < 0) return std::nullopt;
    Vector x = Vector::Zero(n), y = Vector::Zero(n);
    x(bi) = 1.0;
    y(bj) = 1.0;
    return pair_witness(A, cone, x, y);
}

std::optional<Witness> lorentz_pair_witness(const Matrix& A, const Vector& v1) {
    const int n = static_cast<int>(A.rows());
    const double tail = v1.tail(n - 1).norm();
    if (tail <= std::abs(v1(0))) return std::nullopt;
    Vector x(n), y(n);
    x(0) = 1.0;
    x.tail(n - 1) = v1.tail(n - 1) / tail;
    y(0) = 1.0;
    y.tail(n - 1) = -v1.tail(n - 1) / tail;
    x /= std::sqrt(2.0);
    y /= std::sqrt(2.0);
    // <Ax, y> = (lambda - mu) <v1,x><v1,y> > 0 for the two-eigenvalue case.
    return pair_witness(A, ConeSpec::lorentz(n), x, y);
}

} // namespace

QcVerdict qc_analyze(const Matrix& A, const ConeSpec& cone) {
    require_symmetric(A, "qc_analyze");
    if (cone.kind != ConeKind::NonnegOrthant && cone.kind != ConeKind::Lorentz)
        throw std::invalid_argument("qc_analyze: cone must be the orthant or the Lorentz cone");
    if (A.rows() != cone.dim()) throw std::invalid_argument("qc_analyze: dimension mismatch");

    const SpectralData spectral = SpectralData::compute(A);
    const int n = spectral.n();
    QcVerdict out;
    std::ostringstream diag;

    // (1) one eigenvalue: the quadratic is constant on the sphere.
    if (spectral.distinct_count() == 1) {
        out.verdict = Verdict::QuasiConvex;
        out.certificate = CertificateKind::ConstantFunction;
        return out;
    }

    const Vector v1 = spectral.v1();
    const auto v1_in_cone = [&] {
        return contains(cone, v1, kMemberTol) || contains(cone, Vector(-v1), kMemberTol);
    };

    // (2)/(3) two distinct eigenvalues with a simple smallest one: the
    // membership of +-v1 characterizes the verdict outright (n >= 3).
    if (n >= 3 && spectral.distinct_count() == 2 && spectral.smallest_multiplicity() == 1) {
        if (v1_in_cone()) {
            out.verdict = Verdict::QuasiConvex;
            out.certificate = CertificateKind::TwoEigenvalueCharacterization;
            return out;
        }
        std::optional<Witness> w;
        if (cone.kind == ConeKind::NonnegOrthant) w = not_z_witness(A, cone);
        else w = lorentz_pair_witness(A, v1);
        if (w) {
            out.verdict = Verdict::NotQuasiConvex;
            out.witness = *w;
            return out;
        }
        diag << "two-eigenvalue case: v1 outside the cone but witness construction failed; ";
    }

    // (4) repeated smallest eigenvalue of a non-constant quadratic.
    if (spectral.smallest_multiplicity() >= 2) {
        try {
            out.witness = witness_construct(spectral, cone);
            out.verdict = Verdict::NotQuasiConvex;
            return out;
        } catch (const WitnessUnavailable& e) {
            diag << e.what() << "; ";
        }
    }

    // (5) sufficient certificate: shifted copositivity plus v1 in the dual.
    if (spectral.smallest_multiplicity() == 1 && v1_in_cone()) {
        const double l2 = spectral.eigenvalues(1);
        const Matrix shifted = l2 * Matrix::Identity(n, n) - A;
        bool copositive = false;
        std::optional<double> rho;
        bool undecidable = false;
        if (cone.kind == ConeKind::NonnegOrthant) {
            try {
                copositive = orthant_copositive(shifted);
            } catch (const UndecidableError&) {
                undecidable = true;
            }
        } else {
            const auto lc = lorentz_copositive(shifted);
            copositive = lc.copositive;
            rho = lc.rho;
        }
        if (copositive) {
            out.verdict = Verdict::QuasiConvex;
            out.certificate = CertificateKind::CopositiveShift;
            out.rho = rho;
            return out;
        }
        if (undecidable) {
            const auto ev = subdual_sufficient(spectral, cone);
            if (ev.ok) {
                out.verdict = Verdict::QuasiConvex;
                out.certificate = CertificateKind::SubdualSufficient;
                return out;
            }
            diag << "shifted copositivity undecidable at this dimension; ";
        }
    }

    // (6) necessary screen on the orthant: a positive off-diagonal entry
    // yields a violating canonical pair.
    if (cone.kind == ConeKind::NonnegOrthant && !z_matrix_test(A)) {
        if (auto w = not_z_witness(A, cone)) {
            out.verdict = Verdict::NotQuasiConvex;
            out.witness = *w;
            return out;
        }
        diag << "positive off-diagonal entry but witness construction failed; ";
    }

    // (7) nonsingular diagonal with three or more distinct eigenvalues.
    if (cone.kind == ConeKind::NonnegOrthant && is_diagonal(A) &&
        A.diagonal().cwiseAbs().minCoeff() > 1e-12 && spectral.distinct_count() >= 3) {
        try {
            out.witness = witness_construct(spectral, cone);
            out.verdict = Verdict::NotQuasiConvex;
            return out;
        } catch (const WitnessUnavailable& e) {
            diag << e.what() << "; ";
        }
    }

    // (8) honest undecided, with diagnostics.
    out.verdict = Verdict::Undecided;
    diag << wcone_diagnostic(spectral, cone, 100000);
    const auto ev = subdual_sufficient(spectral, cone);
    if (ev.alpha > 0.0) diag << "; spread constant alpha = " << ev.alpha;
    out.diagnostics = diag.str();
    return out;
}

} // namespace esoccp
