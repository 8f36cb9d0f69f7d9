#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "errors.hpp"

namespace ncg {

using cplx = std::complex<double>;

inline double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Truncated holomorphic Taylor series sum c[k] (z - base)^k.
struct Jet1 {
    cplx base{};
    std::vector<cplx> c;

    Jet1() = default;
    Jet1(cplx b, int K) : base(b), c(K + 1, cplx{}) {}
    Jet1(cplx b, std::vector<cplx> coeffs) : base(b), c(std::move(coeffs)) {}

    int order() const { return (int)c.size() - 1; }
    cplx operator[](int k) const { return k < (int)c.size() ? c[k] : cplx{}; }
    cplx& operator[](int k) { return c[k]; }

    static Jet1 constant(cplx b, cplx v, int K) {
        Jet1 j(b, K);
        j.c[0] = v;
        return j;
    }
    // the coordinate itself: base + (z - base)
    static Jet1 variable(cplx b, int K) {
        Jet1 j(b, K);
        j.c[0] = b;
        if (K >= 1) j.c[1] = 1;
        return j;
    }
    double max_abs() const {
        double m = 0;
        for (auto& x : c) m = std::max(m, std::abs(x));
        return m;
    }
};

inline void check_same(const Jet1& a, const Jet1& b) {
    if (a.order() != b.order()) throw usage_error("jet order mismatch");
    if (std::abs(a.base - b.base) > 1e-12 * (1 + std::abs(a.base)))
        throw usage_error("jet base mismatch");
}

inline Jet1 operator+(const Jet1& a, const Jet1& b) {
    check_same(a, b);
    Jet1 r = a;
    for (int k = 0; k <= r.order(); ++k) r.c[k] += b.c[k];
    return r;
}
inline Jet1 operator-(const Jet1& a, const Jet1& b) {
    check_same(a, b);
    Jet1 r = a;
    for (int k = 0; k <= r.order(); ++k) r.c[k] -= b.c[k];
    return r;
}
inline Jet1 operator-(const Jet1& a) {
    Jet1 r = a;
    for (auto& x : r.c) x = -x;
    return r;
}
inline Jet1 operator*(cplx s, const Jet1& a) {
    Jet1 r = a;
    for (auto& x : r.c) x *= s;
    return r;
}
inline Jet1 operator+(const Jet1& a, cplx s) {
    Jet1 r = a;
    r.c[0] += s;
    return r;
}

inline Jet1 j_mul(const Jet1& a, const Jet1& b) {
    check_same(a, b);
    int K = a.order();
    Jet1 r(a.base, K);
    for (int i = 0; i <= K; ++i) {
        if (a.c[i] == cplx{}) continue;
        for (int j = 0; i + j <= K; ++j) r.c[i + j] += a.c[i] * b.c[j];
    }
    return r;
}
inline Jet1 operator*(const Jet1& a, const Jet1& b) { return j_mul(a, b); }

// first index whose coefficient is above 1e-12 * max(1, max|c|); -1 when none
inline int valuation(const Jet1& a, double rel = 1e-12) {
    double th = rel * std::max(1.0, a.max_abs());
    for (int k = 0; k <= a.order(); ++k)
        if (std::abs(a.c[k]) > th) return k;
    return -1;
}

inline Jet1 j_recip(const Jet1& a) {
    if (a.c[0] == cplx{}) throw pole_error("reciprocal of a jet with zero value");
    int K = a.order();
    Jet1 r(a.base, K);
    cplx inv = 1.0 / a.c[0];
    r.c[0] = inv;
    for (int k = 1; k <= K; ++k) {
        cplx s = 0;
        for (int j = 1; j <= k; ++j) s += a.c[j] * r.c[k - j];
        r.c[k] = -inv * s;
    }
    return r;
}

inline Jet1 j_div(const Jet1& a, const Jet1& b) { return j_mul(a, j_recip(b)); }

// num/den after cancelling the common factor (z-base)^v, v = valuation(den)
inline Jet1 j_div_valuation(const Jet1& num, const Jet1& den, double rel = 1e-12) {
    if (num.order() != den.order()) throw usage_error("jet order mismatch");
    int v = valuation(den, rel);
    if (v < 0) throw valuation_error("denominator vanishes to the full jet order");
    int vn = valuation(num, rel);
    if (vn >= 0 && vn < v) throw pole_error("numerator valuation below denominator valuation");
    int K = num.order() - v;
    Jet1 n(num.base, K), d(den.base, K);
    for (int k = 0; k <= K; ++k) {
        n.c[k] = num.c[k + v];
        d.c[k] = den.c[k + v];
    }
    return j_div(n, d);
}

// outer(inner(z)); inner's value must sit at outer's base
inline Jet1 j_compose(const Jet1& outer, const Jet1& inner) {
    if (std::abs(inner.c[0] - outer.base) > 1e-10 * (1 + std::abs(outer.base)))
        throw usage_error("composition base mismatch");
    int K = std::min(outer.order(), inner.order());
    Jet1 d(inner.base, K);
    for (int k = 1; k <= K; ++k) d.c[k] = inner.c[k];
    Jet1 r = Jet1::constant(inner.base, outer.c[K], K);
    for (int k = K - 1; k >= 0; --k) r = j_mul(r, d) + outer.c[k];
    return r;
}

inline Jet1 j_exp(const Jet1& a) {
    int K = a.order();
    Jet1 r(a.base, K);
    r.c[0] = std::exp(a.c[0]);
    for (int k = 1; k <= K; ++k) {
        cplx s = 0;
        for (int j = 1; j <= k; ++j) s += double(j) * a.c[j] * r.c[k - j];
        r.c[k] = s / double(k);
    }
    return r;
}

inline Jet1 j_log(const Jet1& a) {
    if (a.c[0] == cplx{}) throw pole_error("log of zero");
    int K = a.order();
    Jet1 r(a.base, K);
    r.c[0] = std::log(a.c[0]);
    for (int k = 1; k <= K; ++k) {
        cplx s = 0;
        for (int j = 1; j < k; ++j) s += double(j) * r.c[j] * a.c[k - j];
        r.c[k] = (a.c[k] - s / double(k)) / a.c[0];
    }
    return r;
}

inline Jet1 j_sqrt(const Jet1& a) {
    if (a.c[0] == cplx{}) throw pole_error("sqrt at zero");
    int K = a.order();
    Jet1 r(a.base, K);
    r.c[0] = std::sqrt(a.c[0]);
    for (int k = 1; k <= K; ++k) {
        cplx s = 0;
        for (int j = 1; j < k; ++j) s += r.c[j] * r.c[k - j];
        r.c[k] = (a.c[k] - s) / (2.0 * r.c[0]);
    }
    return r;
}

// Taylor coefficients of x^p around x0
inline Jet1 power_series(cplx x0, int p, int K) {
    Jet1 r(x0, K);
    for (int k = 0; k <= std::min(p, K); ++k) r.c[k] = binomial(p, k) * std::pow(x0, p - k);
    return r;
}

// Truncated bivariate series sum c[p,q] (z-base)^p (conj(z)-conj(base))^q, p+q <= K.
struct Jet2 {
    cplx base{};
    int K = 0;
    std::vector<cplx> c;

    Jet2() = default;
    Jet2(cplx b, int k) : base(b), K(k), c((k + 1) * (k + 2) / 2, cplx{}) {}

    static int idx(int p, int q) {
        int t = p + q;
        return t * (t + 1) / 2 + q;
    }
    cplx at(int p, int q) const { return (p + q <= K) ? c[idx(p, q)] : cplx{}; }
    cplx& at(int p, int q) { return c[idx(p, q)]; }
    int order() const { return K; }

    static Jet2 constant(cplx b, cplx v, int k) {
        Jet2 j(b, k);
        j.c[0] = v;
        return j;
    }
    static Jet2 var_z(cplx b, int k) {
        Jet2 j(b, k);
        j.c[0] = b;
        if (k >= 1) j.at(1, 0) = 1;
        return j;
    }
    static Jet2 var_zbar(cplx b, int k) {
        Jet2 j(b, k);
        j.c[0] = std::conj(b);
        if (k >= 1) j.at(0, 1) = 1;
        return j;
    }
    // holomorphic germ seen as a function of (z, zbar)
    static Jet2 from_holo(const Jet1& h, int k) {
        Jet2 j(h.base, k);
        for (int p = 0; p <= k; ++p) j.at(p, 0) = h[p];
        return j;
    }
    // conj of a holomorphic germ
    static Jet2 from_antiholo(const Jet1& h, int k) {
        Jet2 j(h.base, k);
        for (int q = 0; q <= k; ++q) j.at(0, q) = std::conj(h[q]);
        return j;
    }
    bool is_zero() const {
        for (auto& x : c)
            if (x != cplx{}) return false;
        return true;
    }
    // d_z^a d_zbar^b, order drops by a+b
    Jet2 derivative(int a, int b) const {
        int k = K - a - b;
        if (k < 0) throw usage_error("derivative exceeds jet order");
        Jet2 r(base, k);
        for (int t = 0; t <= k; ++t)
            for (int q = 0; q <= t; ++q) {
                int p = t - q;
                r.at(p, q) = c[idx(p + a, q + b)] * (factorial(p + a) / factorial(p)) *
                             (factorial(q + b) / factorial(q));
            }
        return r;
    }
    Jet2 truncated(int k) const {
        Jet2 r(base, k);
        for (int i = 0; i < (int)r.c.size() && i < (int)c.size(); ++i) r.c[i] = c[i];
        return r;
    }
    // restriction to the holomorphic direction: coefficients c[p,0]
    Jet1 pure_z() const {
        Jet1 r(base, K);
        for (int p = 0; p <= K; ++p) r.c[p] = at(p, 0);
        return r;
    }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    if (a.K != b.K) throw usage_error("jet order mismatch");
    Jet2 r = a;
    for (size_t i = 0; i < r.c.size(); ++i) r.c[i] += b.c[i];
    return r;
}
inline Jet2 operator-(const Jet2& a) {
    Jet2 r = a;
    for (auto& x : r.c) x = -x;
    return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) { return a + (-b); }
inline Jet2 operator*(cplx s, const Jet2& a) {
    Jet2 r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

inline Jet2 j_mul(const Jet2& a, const Jet2& b) {
    if (a.K != b.K) throw usage_error("jet order mismatch");
    if (std::abs(a.base - b.base) > 1e-12 * (1 + std::abs(a.base)))
        throw usage_error("jet base mismatch");
    int K = a.K;
    Jet2 r(a.base, K);
    for (int t1 = 0; t1 <= K; ++t1)
        for (int q1 = 0; q1 <= t1; ++q1) {
            cplx x = a.c[Jet2::idx(t1 - q1, q1)];
            if (x == cplx{}) continue;
            for (int t2 = 0; t1 + t2 <= K; ++t2)
                for (int q2 = 0; q2 <= t2; ++q2)
                    r.c[Jet2::idx(t1 - q1 + t2 - q2, q1 + q2)] += x * b.c[Jet2::idx(t2 - q2, q2)];
        }
    return r;
}
inline Jet2 operator*(const Jet2& a, const Jet2& b) { return j_mul(a, b); }

// F(S) for a univariate series F around s0 = S(base)
inline Jet2 compose_univariate(const Jet1& F, const Jet2& S) {
    Jet2 D = S;
    D.c[0] = 0;
    int K = S.K;
    Jet2 r = Jet2::constant(S.base, F[K], K);
    for (int k = K - 1; k >= 0; --k) {
        r = j_mul(r, D);
        r.c[0] += F[k];
    }
    return r;
}

}  // namespace ncg
