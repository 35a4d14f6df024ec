#include "esoccp/fb.hpp"

namespace esoccp {

Vector fb_value(const MixcpInstance& prob, const Vector& ztilde) {
    const int k = prob.k(), l = prob.l();
    if (ztilde.size() != k + l + 1) throw std::invalid_argument("fb_value: bad dimension");
    Vector out(k + l + 1);
    const Vector f1 = prob.f1(ztilde);
    for (int i = 0; i < k; ++i) out(i) = fb_scalar(ztilde(i), f1(i));
    out.tail(l + 1) = prob.f2(ztilde);
    return out;
}

FbJacobian fb_jacobian_at(const MixcpInstance& prob, const Vector& ztilde) {
    const int k = prob.k(), l = prob.l();
    const Vector f1 = prob.f1(ztilde);

    FbJacobian jac;
    jac.da = Vector(k);
    jac.db = Vector(k);
    for (int i = 0; i < k; ++i) {
        const double xi = ztilde(i), fi = f1(i);
        const double rad = std::sqrt(xi * xi + fi * fi);
        if (rad < 1e-14) { // origin selection
            jac.da(i) = -1.0;
            jac.db(i) = -1.0;
        } else {
            jac.da(i) = xi / rad - 1.0;
            jac.db(i) = fi / rad - 1.0;
        }
    }

    const Matrix j1 = prob.jac_f1(ztilde);
    jac.full = Matrix(k + l + 1, k + l + 1);
    jac.full.topRows(k) = jac.db.asDiagonal() * j1;
    jac.full.topLeftCorner(k, k) += Matrix(jac.da.asDiagonal());
    jac.full.bottomRows(l + 1) = prob.jac_f2(ztilde);
    return jac;
}

double FbSystem::merit(const Vector& ztilde) const { return 0.5 * value(ztilde).squaredNorm(); }

Vector FbSystem::merit_gradient(const Vector& ztilde) const {
    return jacobian(ztilde).full.transpose() * value(ztilde);
}

IndexPartition partition_indices(const FbSystem& sys, const Vector& ztilde, double tol) {
    if (tol <= 0.0) throw std::invalid_argument("partition_indices: tol must be positive");
    const int k = sys.k();
    const Vector f1 = sys.problem().f1(ztilde);

    IndexPartition part;
    for (int i = 0; i < k; ++i) {
        const double xi = ztilde(i), fi = f1(i);
        const bool in_comp = xi >= -tol && fi >= -tol && std::abs(xi * fi) <= tol;
        if (in_comp) part.comp.push_back(i);
        else {
            part.resid.push_back(i);
            if (xi > tol && fi > tol) part.pos.push_back(i);
            else part.neg.push_back(i);
        }
        const bool x0 = std::abs(xi) <= tol, f0 = std::abs(fi) <= tol;
        if (x0 && fi > tol) part.alpha.push_back(i);
        else if (x0 && f0) part.beta.push_back(i);
        else if (xi > tol && f0) part.gamma.push_back(i);
        else part.delta.push_back(i);
    }
    return part;
}

} // namespace esoccp
