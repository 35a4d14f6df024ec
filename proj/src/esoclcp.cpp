#include "esoccp/esoclcp.hpp"

#include <stdexcept>

namespace esoccp {

namespace {

double condition_estimate(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / s(s.size() - 1);
}

} // namespace

EsoclcpInstance::EsoclcpInstance(Matrix A_, Matrix B_, Matrix C_, Matrix D_, Vector p_, Vector q_)
    : A(std::move(A_)), B(std::move(B_)), C(std::move(C_)), D(std::move(D_)),
      p(std::move(p_)), q(std::move(q_)) {
    k = static_cast<int>(A.rows());
    l = static_cast<int>(D.rows());
    if (k < 2) throw std::invalid_argument("EsoclcpInstance: k must be >= 2");
    if (l < 1) throw std::invalid_argument("EsoclcpInstance: l must be >= 1");
    if (A.cols() != k || B.rows() != k || B.cols() != l || C.rows() != l || C.cols() != k ||
        D.cols() != l || p.size() != k || q.size() != l)
        throw std::invalid_argument("EsoclcpInstance: inconsistent block dimensions");

    cond_A = condition_estimate(A);
    cond_D = condition_estimate(D);
    cond_T = condition_estimate(T());
    near_singular = !(cond_A < 1e12 && cond_D < 1e12 && cond_T < 1e12);
}

Matrix EsoclcpInstance::T() const {
    Matrix t(k + l, k + l);
    t.topLeftCorner(k, k) = A;
    t.topRightCorner(k, l) = B;
    t.bottomLeftCorner(l, k) = C;
    t.bottomRightCorner(l, l) = D;
    return t;
}

Vector EsoclcpInstance::r() const {
    Vector v(k + l);
    v.head(k) = p;
    v.tail(l) = q;
    return v;
}

Vector EsoclcpInstance::F(const Vector& x, const Vector& u) const {
    if (x.size() != k || u.size() != l)
        throw std::invalid_argument("EsoclcpInstance::F: dimension mismatch");
    Vector out(k + l);
    out.head(k) = A * x + B * u + p;
    out.tail(l) = C * x + D * u + q;
    return out;
}

MixcpInstance::MixcpInstance(EsoclcpInstance inst) : src_(std::move(inst)) {
    Ae_ = src_.A.rowwise().sum();
    colsum_A_ = src_.A.colwise().sum();
    colsum_B_ = src_.B.colwise().sum();
    sum_p_ = src_.p.sum();
}

Vector MixcpInstance::f1(const Vector& ztilde) const {
    const int k = src_.k, l = src_.l;
    const Vector xt = ztilde.head(k);
    const Vector u = ztilde.segment(k, l);
    const double t = ztilde(k + l);
    return src_.A * (xt.array() + t).matrix() + src_.B * u + src_.p;
}

Vector MixcpInstance::f2(const Vector& ztilde) const {
    const int k = src_.k, l = src_.l;
    const Vector xt = ztilde.head(k);
    const Vector u = ztilde.segment(k, l);
    const double t = ztilde(k + l);
    const Vector x = (xt.array() + t).matrix();

    Vector out(l + 1);
    const double eAx = colsum_A_.dot(x);
    const double eBup = colsum_B_.dot(u) + sum_p_;
    out.head(l) = t * (src_.C * x) + u * (eAx + eBup) + t * (src_.D * u + src_.q);
    out(l) = t * t - u.squaredNorm();
    return out;
}

Matrix MixcpInstance::b_tilde() const {
    const int k = src_.k, l = src_.l;
    Matrix bt(k, l + 1);
    bt.leftCols(l) = src_.B;
    bt.col(l) = Ae_;
    return bt;
}

Matrix MixcpInstance::c_tilde(const Vector& ztilde) const {
    const int k = src_.k, l = src_.l;
    const Vector u = ztilde.segment(k, l);
    const double t = ztilde(k + l);
    Matrix ct(l + 1, k);
    ct.topRows(l) = t * src_.C + u * colsum_A_;
    ct.row(l).setZero();
    return ct;
}

Matrix MixcpInstance::d_tilde(const Vector& ztilde) const {
    const int k = src_.k, l = src_.l;
    const Vector xt = ztilde.head(k);
    const Vector u = ztilde.segment(k, l);
    const double t = ztilde(k + l);
    const Vector x = (xt.array() + t).matrix();

    Matrix dt(l + 1, l + 1);
    const double eF1 = colsum_A_.dot(x) + colsum_B_.dot(u) + sum_p_; // e^T F1(z~)
    dt.topLeftCorner(l, l) =
        eF1 * Matrix::Identity(l, l) + u * colsum_B_ + t * src_.D;
    // d/dt of the top block; the e^T A e term carries the u factor and the
    // chain rule through x = x~ + t e doubles the C e contribution.
    dt.topRightCorner(l, 1) =
        src_.C * xt + 2.0 * t * src_.C.rowwise().sum() + colsum_A_.sum() * u + src_.D * u + src_.q;
    dt.bottomLeftCorner(1, l) = -2.0 * u.transpose();
    dt(l, l) = 2.0 * t;
    return dt;
}

Matrix MixcpInstance::jac_f1(const Vector& /*ztilde*/) const {
    const int k = src_.k, l = src_.l;
    Matrix j(k, k + l + 1);
    j.leftCols(k) = src_.A;
    j.rightCols(l + 1) = b_tilde();
    return j;
}

Matrix MixcpInstance::jac_f2(const Vector& ztilde) const {
    const int k = src_.k, l = src_.l;
    Matrix j(l + 1, k + l + 1);
    j.leftCols(k) = c_tilde(ztilde);
    j.rightCols(l + 1) = d_tilde(ztilde);
    return j;
}

PairClassification classify_pair(const Vector& x, const Vector& u, const Vector& y,
                                 const Vector& v, double tol) {
    if (x.size() != y.size() || u.size() != v.size())
        throw std::invalid_argument("classify_pair: dimension mismatch");
    const double scale = std::max({1.0, x.lpNorm<Eigen::Infinity>(), y.lpNorm<Eigen::Infinity>(),
                                   u.lpNorm<Eigen::Infinity>(), v.lpNorm<Eigen::Infinity>()});
    const double eps = tol * scale;
    const bool u_zero = u.norm() <= 1e-10 * scale;
    const bool v_zero = v.norm() <= 1e-10 * scale;

    const auto orthant_pair = [&](const Vector& a, const Vector& b) {
        return a.minCoeff() >= -eps && b.minCoeff() >= -eps && std::abs(a.dot(b)) <= eps;
    };

    PairClassification out;
    if (u_zero && v_zero) {
        if (orthant_pair(x, y)) out.c = PairCase::I;
        return out;
    }
    if (u_zero) {
        if (y.sum() >= v.norm() - eps && orthant_pair(x, y)) out.c = PairCase::II;
        return out;
    }
    if (v_zero) {
        const double un = u.norm();
        if ((x.array() - un).minCoeff() >= -eps && orthant_pair(x, y)) out.c = PairCase::III;
        return out;
    }

    const double un = u.norm();
    const double lambda = y.sum() / un;
    const Vector xs = (x.array() - un).matrix();
    if (lambda > 0.0 && (v + lambda * u).lpNorm<Eigen::Infinity>() <= eps &&
        std::abs(y.sum() - v.norm()) <= eps && orthant_pair(xs, y)) {
        out.c = PairCase::IV;
        out.lambda = lambda;
    }
    return out;
}

MixcpInstance reformulate_vi(const EsoclcpInstance& inst) { return MixcpInstance(inst); }

ReformIReport reformulate_i(const EsoclcpInstance& inst, const Vector& x) {
    if (x.size() != inst.k) throw std::invalid_argument("reformulate_i: dimension mismatch");
    ReformIReport rep;
    const Vector y = inst.A * x + inst.p;
    rep.lcp_residual = complementarity_residual(ConeSpec::orthant(inst.k), x, y);
    rep.norm_gap = y.sum() - (inst.C * x + inst.q).norm();
    rep.ok = rep.lcp_residual <= 1e-10 && rep.norm_gap >= -1e-10;
    return rep;
}

std::pair<Vector, Vector> back_map(const Vector& ztilde, int k, int l) {
    if (ztilde.size() != k + l + 1) throw std::invalid_argument("back_map: dimension mismatch");
    const double t = ztilde(k + l);
    if (t < -1e-12) throw std::invalid_argument("back_map: t must be nonnegative");
    Vector x = (ztilde.head(k).array() + t).matrix();
    Vector u = ztilde.segment(k, l);
    return {std::move(x), std::move(u)};
}

VerifyReport verify_solution(const EsoclcpInstance& inst, const Vector& x, const Vector& u,
                             double tol) {
    VerifyReport rep;
    Vector z(inst.k + inst.l);
    z.head(inst.k) = x;
    z.tail(inst.l) = u;
    const Vector f = inst.F(x, u);
    rep.l_violation = cone_violation(ConeSpec::esoc(inst.k, inst.l), z);
    rep.m_violation = cone_violation(ConeSpec::dual_esoc(inst.k, inst.l), f);
    rep.gap = std::abs(z.dot(f));
    rep.in_L = rep.l_violation <= tol;
    rep.in_M = rep.m_violation <= tol;
    rep.pass = rep.in_L && rep.in_M && rep.gap <= tol * std::max(1.0, z.norm() * f.norm());
    return rep;
}

} // namespace esoccp
