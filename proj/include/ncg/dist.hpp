#pragma once

#include "quadrature.hpp"
#include "expr.hpp"

namespace ncg {

struct KernelResult {
    cplx value{};
    double est_error = 0;
    bool converged = true;
};

// euclidean integral of psi(z)/(z - z0): polar coordinates on a disk around z0 blended by a cutoff,
// plain quadtree outside
inline KernelResult cauchy_integral(const Field& psi, cplx z0, const QuadratureSpec& spec) {
    KernelResult r;
    if (psi.is_zero()) return r;
    Box b = support_box(psi);
    if (!b.bounded()) throw precondition_error("test function must have bounded support");
    double w = std::min(b.x1 - b.x0, b.y1 - b.y0);
    double rho = std::max(1e-3, 0.25 * w);
    Program P(psi);
    Box near = Box::disk(z0, rho);
    bool touches = !intersect(b, near).empty;
    auto far_make = [&] {
        return [&P, z0, rho, touches, wk = P.work()](cplx z) mutable -> cplx {
            double chi = touches ? detail::bump_value(z0, rho / 2, rho, z) : 0.0;
            if (chi == 1.0) return 0;
            cplx v = P.eval(z, wk);
            if (v == cplx{}) return 0;
            return (1 - chi) * v / (z - z0);
        };
    };
    QuadResult far = integrate_box(far_make, b, spec);
    r.value = far.value;
    r.est_error = far.est_error;
    r.converged = far.converged;
    if (touches) {
        auto near_make = [&] {
            return [&P, z0, rho, wk = P.work()](cplx rt) mutable -> cplx {
                double rr = rt.real(), th = rt.imag();
                double chi = detail::bump_value(0, rho / 2, rho, rr);
                if (chi == 0) return 0;
                cplx e = std::polar(1.0, th);
                return chi * P.eval(z0 + rr * e, wk) * std::conj(e);
            };
        };
        QuadResult nr = integrate_box(near_make, Box::of(0, rho, 0, 2 * M_PI), spec);
        r.value += nr.value;
        r.est_error += nr.est_error;
        r.converged = r.converged && nr.converged;
    }
    return r;
}

struct RenormKernel {
    int n = 1;
    cplx z0{};
    cplx shift{};  // adds shift * delta(z - z0)
};

// <d^{n-1} (1/pi(z - z0)), phi> by parts
inline KernelResult pair_kernel(const RenormKernel& K, const Field& phi, const QuadratureSpec& spec) {
    if (K.n < 1 || K.n > 8) throw usage_error("kernel order out of range");
    Field psi = phi.derivative(K.n - 1, 0);
    KernelResult r = cauchy_integral(psi, K.z0, spec);
    double sgn = (K.n - 1) % 2 ? -1.0 : 1.0;
    r.value *= sgn / M_PI;
    r.est_error /= M_PI;
    if (K.shift != cplx{}) r.value += K.shift * eval(phi, K.z0);
    return r;
}

struct DolbeaultCheck {
    cplx lhs{}, rhs{};
    double defect = 0;
    double est_error = 0;
};

// -(1/pi) int (1/(z - z0)) dphi/dzb against phi(z0)
inline DolbeaultCheck check_dolbeault(cplx z0, const Field& phi, const QuadratureSpec& spec) {
    KernelResult k = cauchy_integral(phi.dzbar(), z0, spec);
    DolbeaultCheck r;
    r.lhs = -k.value / M_PI;
    r.rhs = eval(phi, z0);
    r.defect = std::abs(r.lhs - r.rhs);
    r.est_error = k.est_error / M_PI;
    return r;
}

struct CovarianceCheck {
    cplx lhs{}, rhs{};
    double defect = 0;
};

// the order-n kernel times ((z - z0)/(w - w0))^n against phi in z, versus the order-n kernel in w = h(z)
inline CovarianceCheck check_covariance(int n, const ConformalMap& h, cplx z0, const Field& phi,
                                        const QuadratureSpec& spec) {
    if (!h.mobius_like()) throw usage_error("coordinate change must be Mobius");
    Mat2 M = h.matrix();
    cplx det = M[0] * M[3] - M[1] * M[2];
    if (h.has_pole(z0)) throw domain_error("coordinate change has a pole at the base point");
    Box sb = support_box(phi);
    if (M[2] != cplx{} && sb.contains(-M[3] / M[2])) throw domain_error("coordinate change has a pole on the support");
    // (z - z0)/(w - w0) = (cz + d)(c z0 + d)/det
    Field F = (Field(M[2]) * Field::z() + Field(M[3])) * Field((M[2] * z0 + M[3]) / det);
    CovarianceCheck r;
    r.lhs = pair_kernel({n, z0}, F.pow(n) * phi, spec).value;
    ConformalMap hi = *h.inverse();
    Field jac = Field::map_derivative(hi, 1, false) * Field::map_derivative(hi, 1, true);
    Field moved = pullback(phi, hi) * jac;
    r.rhs = pair_kernel({n, h.eval(z0)}, moved, spec).value;
    r.defect = std::abs(r.lhs - r.rhs);
    return r;
}

}  // namespace ncg
