#include "esoccp/cones.hpp"

#include <stdexcept>

namespace esoccp {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

ConeSpec ConeSpec::orthant(int n) {
    require(n >= 1, "orthant: dimension must be >= 1");
    return ConeSpec{ConeKind::NonnegOrthant, n, 0};
}

ConeSpec ConeSpec::lorentz(int n) {
    require(n >= 2, "lorentz: dimension must be >= 2");
    return ConeSpec{ConeKind::Lorentz, n, 0};
}

ConeSpec ConeSpec::esoc(int k, int l) {
    require(k >= 2, "esoc: k must be >= 2 (k = 1 is a Lorentz cone)");
    require(l >= 1, "esoc: l must be >= 1");
    return ConeSpec{ConeKind::Esoc, k, l};
}

ConeSpec ConeSpec::dual_esoc(int k, int l) {
    require(k >= 2, "dual_esoc: k must be >= 2");
    require(l >= 1, "dual_esoc: l must be >= 1");
    return ConeSpec{ConeKind::DualEsoc, k, l};
}

ConeSpec ConeSpec::dual() const {
    switch (kind) {
        case ConeKind::NonnegOrthant:
        case ConeKind::Lorentz: return *this;
        case ConeKind::Esoc: return ConeSpec{ConeKind::DualEsoc, k, l};
        case ConeKind::DualEsoc: return ConeSpec{ConeKind::Esoc, k, l};
    }
    throw std::logic_error("unreachable");
}

double cone_violation(const ConeSpec& cone, const Vector& z) {
    if (z.size() != cone.dim())
        throw std::invalid_argument("cone_violation: dimension mismatch");
    switch (cone.kind) {
        case ConeKind::NonnegOrthant:
            return std::max(0.0, -z.minCoeff());
        case ConeKind::Lorentz:
            return std::max(0.0, z.tail(z.size() - 1).norm() - z(0));
        case ConeKind::Esoc: {
            const double un = z.tail(cone.l).norm();
            return std::max(0.0, un - z.head(cone.k).minCoeff());
        }
        case ConeKind::DualEsoc: {
            const Vector x = z.head(cone.k);
            const double un = z.tail(cone.l).norm();
            double v = std::max(0.0, un - x.sum());
            return std::max(v, std::max(0.0, -x.minCoeff()));
        }
    }
    throw std::logic_error("unreachable");
}

bool contains(const ConeSpec& cone, const Vector& z, double tol) {
    return cone_violation(cone, z) <= tol;
}

MoreauParts lorentz_moreau(const Vector& x) {
    const Eigen::Index n = x.size();
    if (n < 2) throw std::invalid_argument("lorentz_moreau: dimension must be >= 2");

    MoreauParts parts;
    if (x.norm() == 0.0) {
        parts.plus = Vector::Zero(n);
        parts.minus = Vector::Zero(n);
        parts.abs = Vector::Zero(n);
        return parts;
    }

    const double tail = x.tail(n - 1).norm();
    if (x(0) >= tail) { // x in the cone
        parts.plus = x;
        parts.minus = Vector::Zero(n);
        parts.abs = x;
        return parts;
    }
    if (-x(0) >= tail) { // -x in the cone
        parts.plus = Vector::Zero(n);
        parts.minus = -x;
        parts.abs = -x;
        return parts;
    }

    // |x1| < ||x^(2)||, so tail > 0 and the closed-form projection applies.
    parts.plus = Vector(n);
    parts.minus = Vector(n);
    const double cp = (x(0) + tail) / (2.0 * tail);
    const double cm = (-x(0) + tail) / (2.0 * tail);
    parts.plus(0) = cp * tail;
    parts.plus.tail(n - 1) = cp * x.tail(n - 1);
    parts.minus(0) = cm * tail;
    parts.minus.tail(n - 1) = -cm * x.tail(n - 1);
    parts.abs = parts.plus + parts.minus;
    return parts;
}

double complementarity_residual(const ConeSpec& cone, const Vector& z, const Vector& w) {
    if (z.size() != cone.dim() || w.size() != cone.dim())
        throw std::invalid_argument("complementarity_residual: dimension mismatch");
    double r = cone_violation(cone, z);
    r = std::max(r, cone_violation(cone.dual(), w));
    return std::max(r, std::abs(z.dot(w)));
}

} // namespace esoccp
