#pragma once

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "jets.hpp"

namespace ncg {

struct Box {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    bool empty = true;
    bool unbounded = false;

    static Box none() { return Box{}; }
    static Box all() {
        Box b;
        b.empty = false;
        b.unbounded = true;
        return b;
    }
    static Box of(double x0, double x1, double y0, double y1) {
        Box b{x0, x1, y0, y1, false, false};
        return b;
    }
    static Box disk(cplx c, double r) { return of(c.real() - r, c.real() + r, c.imag() - r, c.imag() + r); }
    bool bounded() const { return !empty && !unbounded; }
    bool contains(cplx z) const {
        if (empty) return false;
        if (unbounded) return true;
        return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
    }
};

inline Box unite(const Box& a, const Box& b) {
    if (a.empty) return b;
    if (b.empty) return a;
    if (a.unbounded || b.unbounded) return Box::all();
    return Box::of(std::min(a.x0, b.x0), std::max(a.x1, b.x1), std::min(a.y0, b.y0), std::max(a.y1, b.y1));
}
inline Box intersect(const Box& a, const Box& b) {
    if (a.empty || b.empty) return Box::none();
    if (a.unbounded) return b;
    if (b.unbounded) return a;
    Box r = Box::of(std::max(a.x0, b.x0), std::min(a.x1, b.x1), std::max(a.y0, b.y0), std::min(a.y1, b.y1));
    if (r.x0 > r.x1 || r.y0 > r.y1) return Box::none();
    return r;
}

struct Region {
    enum Kind { FullPlane, Disk, Rect } kind = FullPlane;
    cplx center{};
    double radius = 0;
    cplx lo{}, hi{};

    static Region full() { return Region{}; }
    static Region disk(cplx c, double r) {
        if (!(r > 0)) throw usage_error("disk radius must be positive");
        Region g;
        g.kind = Disk;
        g.center = c;
        g.radius = r;
        return g;
    }
    static Region rect(cplx lo, cplx hi) {
        if (!(lo.real() < hi.real() && lo.imag() < hi.imag())) throw usage_error("rect corners out of order");
        Region g;
        g.kind = Rect;
        g.lo = lo;
        g.hi = hi;
        return g;
    }
    bool contains(cplx z) const {
        switch (kind) {
            case Disk: return std::abs(z - center) < radius;
            case Rect:
                return z.real() > lo.real() && z.real() < hi.real() && z.imag() > lo.imag() && z.imag() < hi.imag();
            default: return true;
        }
    }
    Box box() const {
        switch (kind) {
            case Disk: return Box::disk(center, radius);
            case Rect: return Box::of(lo.real(), hi.real(), lo.imag(), hi.imag());
            default: return Box::all();
        }
    }
};

using Mat2 = std::array<cplx, 4>;  // a b c d

// Holomorphic partial map of the plane.
struct ConformalMap {
    enum Kind { Identity, Affine, Mobius, Poly, Chain } kind = Identity;
    cplx a{1}, b{0}, c{0}, d{1};
    std::vector<cplx> coeffs;          // Poly: sum coeffs[k] z^k
    std::vector<ConformalMap> chain;   // chain[0] o chain[1] o ... (last applied first)
    Region domain;
    bool empty_domain = false;

    static ConformalMap identity() { return ConformalMap{}; }
    static ConformalMap affine(cplx a, cplx b) {
        ConformalMap m;
        m.kind = Affine;
        m.a = a;
        m.b = b;
        return m;
    }
    static ConformalMap mobius(cplx a, cplx b, cplx c, cplx d) {
        if (std::abs(a * d - b * c) == 0) throw usage_error("singular Mobius matrix");
        ConformalMap m;
        m.kind = Mobius;
        m.a = a;
        m.b = b;
        m.c = c;
        m.d = d;
        return m;
    }
    static ConformalMap poly(std::vector<cplx> k) {
        ConformalMap m;
        m.kind = Poly;
        m.coeffs = std::move(k);
        return m;
    }
    ConformalMap with_domain(Region r) const {
        ConformalMap m = *this;
        m.domain = r;
        return m;
    }

    bool mobius_like() const { return kind == Identity || kind == Affine || kind == Mobius; }

    Mat2 matrix() const {
        switch (kind) {
            case Identity: return {1, 0, 0, 1};
            case Affine: return {a, b, 0, 1};
            case Mobius: return {a, b, c, d};
            default: throw unsupported_error("map has no matrix");
        }
    }

    bool has_pole(cplx z) const {
        if (kind == Mobius && c != cplx{}) {
            cplx w = c * z + d;
            return std::abs(w) <= 1e-14 * (std::abs(c * z) + std::abs(d));
        }
        return false;
    }

    bool in_domain(cplx z) const {
        if (!domain.contains(z)) return false;
        if (kind == Chain) {
            cplx w = z;
            for (int i = (int)chain.size() - 1; i >= 0; --i) {
                if (!chain[i].in_domain(w)) return false;
                w = chain[i].raw_eval(w);
            }
            return true;
        }
        return !has_pole(z);
    }

    cplx raw_eval(cplx z) const {
        switch (kind) {
            case Identity: return z;
            case Affine: return a * z + b;
            case Mobius: {
                cplx w = c * z + d;
                if (has_pole(z)) throw pole_error("evaluation at a Mobius pole");
                return (a * z + b) / w;
            }
            case Poly: {
                cplx r = 0;
                for (int k = (int)coeffs.size() - 1; k >= 0; --k) r = r * z + coeffs[k];
                return r;
            }
            case Chain: {
                cplx w = z;
                for (int i = (int)chain.size() - 1; i >= 0; --i) w = chain[i].eval(w);
                return w;
            }
        }
        return z;
    }

    cplx eval(cplx z) const {
        if (!domain.contains(z)) throw domain_error("point outside map domain");
        return raw_eval(z);
    }
    cplx operator()(cplx z) const { return eval(z); }

    // Taylor coefficients g(z0), g'(z0), g''(z0)/2!, ...
    Jet1 jet(cplx z0, int K) const {
        if (!domain.contains(z0)) throw domain_error("jet requested outside map domain");
        Jet1 j(z0, K);
        switch (kind) {
            case Identity:
                j.c[0] = z0;
                if (K >= 1) j.c[1] = 1;
                return j;
            case Affine:
                j.c[0] = a * z0 + b;
                if (K >= 1) j.c[1] = a;
                return j;
            case Mobius: {
                if (c == cplx{}) {
                    j.c[0] = (a * z0 + b) / d;
                    if (K >= 1) j.c[1] = a / d;
                    return j;
                }
                if (has_pole(z0)) throw pole_error("jet at a Mobius pole");
                cplx w = c * z0 + d, det = a * d - b * c;
                j.c[0] = (a * z0 + b) / w;
                cplx pw = w * w, pc = 1;
                for (int k = 1; k <= K; ++k) {
                    j.c[k] = det * pc / pw;
                    pc *= -c;
                    pw *= w;
                }
                return j;
            }
            case Poly: {
                // Taylor shift by repeated synthetic division
                std::vector<cplx> p = coeffs;
                int n = (int)p.size();
                for (int k = 0; k < n; ++k) {
                    for (int i = n - 2; i >= k; --i) p[i] += z0 * p[i + 1];
                }
                for (int k = 0; k <= K && k < n; ++k) j.c[k] = p[k];
                return j;
            }
            case Chain: {
                Jet1 r = chain.back().jet(z0, K);
                for (int i = (int)chain.size() - 2; i >= 0; --i) r = j_compose(chain[i].jet(r.c[0], K), r);
                return r;
            }
        }
        return j;
    }

    // k-th complex derivative at z
    cplx derivative(cplx z, int k) const {
        Jet1 j = jet(z, k);
        return j.c[k] * factorial(k);
    }

    bool is_identity_germ() const {
        switch (kind) {
            case Identity: return true;
            case Affine: return a == cplx{1} && b == cplx{};
            case Mobius: {
                double s = std::abs(a) + std::abs(d);
                return std::abs(b) <= 1e-13 * s && std::abs(c) <= 1e-13 * s && std::abs(a - d) <= 1e-13 * s;
            }
            case Poly: {
                for (size_t k = 0; k < coeffs.size(); ++k)
                    if (coeffs[k] != (k == 1 ? cplx{1} : cplx{})) return false;
                return coeffs.size() >= 2;
            }
            case Chain: {
                bool all_mob = true;
                for (auto& m : chain) all_mob = all_mob && m.mobius_like();
                if (all_mob) {
                    Mat2 M{1, 0, 0, 1};
                    for (auto& m : chain) {
                        Mat2 N = m.matrix();
                        M = {M[0] * N[0] + M[1] * N[2], M[0] * N[1] + M[1] * N[3], M[2] * N[0] + M[3] * N[2],
                             M[2] * N[1] + M[3] * N[3]};
                    }
                    return ConformalMap::mobius(M[0], M[1], M[2], M[3]).is_identity_germ();
                }
                for (auto& m : chain)
                    if (!m.is_identity_germ()) return false;
                return true;
            }
        }
        return false;
    }

    std::optional<ConformalMap> inverse() const {
        switch (kind) {
            case Identity: return identity();
            case Affine: return affine(1.0 / a, -b / a);
            case Mobius: return mobius(d, -b, -c, a);
            case Chain: {
                ConformalMap m;
                m.kind = Chain;
                for (int i = (int)chain.size() - 1; i >= 0; --i) {
                    auto inv = chain[i].inverse();
                    if (!inv) return std::nullopt;
                    m.chain.push_back(*inv);
                }
                return m;
            }
            default: return std::nullopt;
        }
    }
};

inline Mat2 mat_mul(const Mat2& M, const Mat2& N) {
    return {M[0] * N[0] + M[1] * N[2], M[0] * N[1] + M[1] * N[3], M[2] * N[0] + M[3] * N[2],
            M[2] * N[1] + M[3] * N[3]};
}

inline ConformalMap map_from_matrix(const Mat2& M) {
    if (M[2] == cplx{} && M[3] != cplx{}) {
        cplx a = M[0] / M[3], b = M[1] / M[3];
        if (a == cplx{1} && b == cplx{}) return ConformalMap::identity();
        return ConformalMap::affine(a, b);
    }
    return ConformalMap::mobius(M[0], M[1], M[2], M[3]);
}

inline Jet1 map_jet(const ConformalMap& g, cplx z0, int K) { return g.jet(z0, K); }

// g o h
inline ConformalMap compose_maps(const ConformalMap& g, const ConformalMap& h) {
    bool gfull = g.domain.kind == Region::FullPlane, hfull = h.domain.kind == Region::FullPlane;
    if (g.kind == ConformalMap::Identity && gfull) return h;
    if (h.kind == ConformalMap::Identity && hfull) return g;
    if (g.mobius_like() && h.mobius_like() && gfull && hfull) {
        if (g.kind == ConformalMap::Mobius || h.kind == ConformalMap::Mobius) {
            Mat2 M = mat_mul(g.matrix(), h.matrix());
            if (M[2] == cplx{}) return map_from_matrix(M);
            return ConformalMap::mobius(M[0], M[1], M[2], M[3]);
        }
        return map_from_matrix(mat_mul(g.matrix(), h.matrix()));
    }
    ConformalMap m;
    m.kind = ConformalMap::Chain;
    auto push = [&](const ConformalMap& x) {
        if (x.kind == ConformalMap::Chain && x.domain.kind == Region::FullPlane)
            for (auto& y : x.chain) m.chain.push_back(y);
        else
            m.chain.push_back(x);
    };
    push(g);
    push(h);
    // sampled emptiness check over the innermost bounded domain
    Box bx = Box::none();
    for (auto it = m.chain.rbegin(); it != m.chain.rend(); ++it)
        if (it->domain.kind != Region::FullPlane) {
            bx = it->domain.box();
            break;
        }
    if (bx.bounded()) {
        bool hit = false;
        const int n = 48;
        for (int i = 0; i < n && !hit; ++i)
            for (int j = 0; j < n && !hit; ++j) {
                cplx z(bx.x0 + (bx.x1 - bx.x0) * (i + 0.5) / n, bx.y0 + (bx.y1 - bx.y0) * (j + 0.5) / n);
                hit = m.in_domain(z);
            }
        m.empty_domain = !hit;
    }
    return m;
}

// Bounding box of the preimage of a box under an invertible Mobius-like map;
// unbounded when the preimage contains the pole of the inverse.
inline Box preimage_box(const ConformalMap& g, const Box& b) {
    if (!b.bounded()) return b;
    if (g.kind == ConformalMap::Identity) return b;
    ConformalMap m = g;
    if (m.kind == ConformalMap::Chain) {
        bool ok = true;
        for (auto& x : m.chain) ok = ok && x.mobius_like();
        if (!ok) return Box::all();
        Mat2 M{1, 0, 0, 1};
        for (auto& x : m.chain) M = mat_mul(M, x.matrix());
        m = map_from_matrix(M);
    }
    if (!m.mobius_like()) return Box::all();
    auto inv = *m.inverse();
    cplx c0((b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2);
    double r = std::hypot(b.x1 - b.x0, b.y1 - b.y0) / 2;
    if (inv.kind == ConformalMap::Mobius && inv.c != cplx{}) {
        cplx pole = -inv.d / inv.c;
        if (std::abs(pole - c0) <= r * (1 + 1e-9)) return Box::all();
    }
    cplx p1 = inv.raw_eval(c0 + r), p2 = inv.raw_eval(c0 + cplx(0, r)), p3 = inv.raw_eval(c0 - r);
    // circumcircle of the three image points
    cplx a = p2 - p1, bb = p3 - p1;
    double D = 2 * (a.real() * bb.imag() - a.imag() * bb.real());
    if (std::abs(D) < 1e-300) return Box::all();
    double ux = (bb.imag() * std::norm(a) - a.imag() * std::norm(bb)) / D;
    double uy = (a.real() * std::norm(bb) - bb.real() * std::norm(a)) / D;
    cplx center = p1 + cplx(ux, uy);
    double rad = std::abs(cplx(ux, uy));
    return Box::disk(center, rad * (1 + 1e-9));
}

}  // namespace ncg
