#pragma once

#include <array>
#include <functional>
#include <map>
#include <tuple>
#include <vector>

#include "expr.hpp"
#include "words.hpp"

namespace ncg {

// Differential form with coefficients in basis {1, dz, dzb, dz^dzb}, index p + 2q.
struct Form {
    std::array<Field, 4> f;

    static int idx(int p, int q) { return p + 2 * q; }
    static Form zero_form(const Field& x) {
        Form r;
        r.f[0] = x;
        return r;
    }
    static Form of(int p, int q, const Field& x) {
        Form r;
        r.f[idx(p, q)] = x;
        return r;
    }
    const Field& at(int p, int q) const { return f[idx(p, q)]; }
    Field& at(int p, int q) { return f[idx(p, q)]; }
    bool is_zero() const {
        for (auto& x : f)
            if (!x.is_zero()) return false;
        return true;
    }
};

inline Form operator+(const Form& a, const Form& b) {
    Form r;
    for (int i = 0; i < 4; ++i) r.f[i] = a.f[i] + b.f[i];
    return r;
}
inline Form operator-(const Form& a) {
    Form r;
    for (int i = 0; i < 4; ++i) r.f[i] = -a.f[i];
    return r;
}
inline Form operator-(const Form& a, const Form& b) { return a + (-b); }
inline Form operator*(const Field& s, const Form& a) {
    Form r;
    for (int i = 0; i < 4; ++i) r.f[i] = s * a.f[i];
    return r;
}

inline Form wedge(const Form& a, const Form& b) {
    Form r;
    std::array<std::vector<Field>, 4> acc;
    for (int q1 = 0; q1 < 2; ++q1)
        for (int p1 = 0; p1 < 2; ++p1) {
            const Field& x = a.at(p1, q1);
            if (x.is_zero()) continue;
            for (int q2 = 0; q2 < 2; ++q2)
                for (int p2 = 0; p2 < 2; ++p2) {
                    if (p1 + p2 > 1 || q1 + q2 > 1) continue;
                    const Field& y = b.at(p2, q2);
                    if (y.is_zero()) continue;
                    Field t = x * y;
                    if (q1 * p2) t = -t;
                    acc[Form::idx(p1 + p2, q1 + q2)].push_back(t);
                }
        }
    for (int i = 0; i < 4; ++i) {
        std::vector<NodeP> ns;
        for (auto& t : acc[i]) ns.push_back(t.node());
        r.f[i] = Field(detail::add(ns));
    }
    return r;
}

// (-1)^deg on each homogeneous part
inline Form parity(const Form& a) {
    Form r = a;
    r.f[1] = -r.f[1];
    r.f[2] = -r.f[2];
    return r;
}

inline Form pullback(const Form& a, const ConformalMap& g) {
    if (g.kind == ConformalMap::Identity && g.domain.kind == Region::FullPlane) return a;
    Form r;
    Field d1 = Field::map_derivative(g, 1, false), d1c = Field::map_derivative(g, 1, true);
    for (int q = 0; q < 2; ++q)
        for (int p = 0; p < 2; ++p) {
            const Field& x = a.at(p, q);
            if (x.is_zero()) continue;
            Field t = pullback(x, g);
            if (p) t = t * d1;
            if (q) t = t * d1c;
            r.at(p, q) = t;
        }
    return r;
}

// square matrix of forms
struct FMat {
    int n = 0;
    std::vector<Form> e;

    FMat() = default;
    explicit FMat(int n_) : n(n_), e(n_ * n_) {}
    static FMat identity(int n) {
        FMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = Form::zero_form(1.0);
        return m;
    }
    static FMat scalar(int n, const Field& x) {
        FMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = Form::zero_form(x);
        return m;
    }
    Form& operator()(int i, int j) { return e[i * n + j]; }
    const Form& operator()(int i, int j) const { return e[i * n + j]; }
    bool is_zero() const {
        for (auto& x : e)
            if (!x.is_zero()) return false;
        return true;
    }
    FMat map(const std::function<Form(const Form&)>& fn) const {
        FMat r(n);
        for (size_t i = 0; i < e.size(); ++i) r.e[i] = fn(e[i]);
        return r;
    }
};

inline void check_dim(const FMat& a, const FMat& b) {
    if (a.n != b.n) throw usage_error("matrix size mismatch");
}
inline FMat operator+(const FMat& a, const FMat& b) {
    check_dim(a, b);
    FMat r(a.n);
    for (size_t i = 0; i < a.e.size(); ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}
inline FMat operator*(const Field& s, const FMat& a) {
    return a.map([&](const Form& x) { return s * x; });
}

inline FMat mat_wedge(const FMat& a, const FMat& b) {
    check_dim(a, b);
    int n = a.n;
    FMat r(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::array<std::vector<NodeP>, 4> acc;
            for (int k = 0; k < n; ++k) {
                if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
                Form t = wedge(a(i, k), b(k, j));
                for (int c = 0; c < 4; ++c)
                    if (!t.f[c].is_zero()) acc[c].push_back(t.f[c].node());
            }
            for (int c = 0; c < 4; ++c) r(i, j).f[c] = Field(detail::add(acc[c]));
        }
    return r;
}

struct Key {
    Word w;
    int label = 0;
    bool operator<(const Key& o) const { return std::tie(label, w) < std::tie(o.label, o.w); }
    bool operator==(const Key& o) const { return w == o.w && label == o.label; }
};

// Finite sum of matrix-valued forms times group labels, tensored with words.
// Plain crossed-product elements carry the unit word.
struct Element {
    int n = 1;
    std::map<Key, FMat> terms;

    Element() = default;
    explicit Element(int n_) : n(n_) {}

    void add(const Key& k, const FMat& m) {
        if (m.n != n) throw usage_error("matrix size mismatch");
        auto it = terms.find(k);
        if (it == terms.end()) {
            if (!m.is_zero()) terms.emplace(k, m);
        } else {
            it->second = it->second + m;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
    // f U*_g
    static Element generator(const FMat& m, int label, Word w = unit_word()) {
        Element e(m.n);
        e.add(Key{std::move(w), label}, m);
        return e;
    }
    static Element scalar(int n, const Field& x, int unit_label = 0) {
        return generator(FMat::scalar(n, x), unit_label);
    }
    static Element one(int n, int unit_label = 0) { return scalar(n, 1.0, unit_label); }
    bool is_zero() const { return terms.empty(); }
    int max_order() const {
        int m = 0;
        for (auto& [k, v] : terms) m = std::max(m, word_order(k.w));
        return m;
    }
};

inline Element operator+(const Element& a, const Element& b) {
    if (a.n != b.n) throw usage_error("matrix size mismatch");
    Element r = a;
    for (auto& [k, m] : b.terms) r.add(k, m);
    return r;
}
inline Element operator*(const Field& s, const Element& a) {
    Element r(a.n);
    for (auto& [k, m] : a.terms) r.add(k, s * m);
    return r;
}
inline Element operator-(const Element& a) { return Field(-1.0) * a; }
inline Element operator-(const Element& a, const Element& b) { return a + (-b); }

inline Element map_coeffs(const Element& a, const std::function<FMat(const Key&, const FMat&)>& fn) {
    Element r(a.n);
    for (auto& [k, m] : a.terms) r.add(k, fn(k, m));
    return r;
}

// (f1 U*_g1)(f2 U*_g2) = f1 ^ g1^*(f2) U*_{g2 g1}; word parts multiply by the Fedosov product
inline Element cp_mul(const Element& x, const Element& y, const WordAlgebra& W) {
    if (x.n != y.n) throw usage_error("matrix size mismatch");
    const GroupAction& act = W.action();
    Element r(x.n);
    for (auto& [k1, m1] : x.terms) {
        const ConformalMap& g1 = act.map(k1.label);
        for (auto& [k2, m2] : y.terms) {
            WordPoly wp = W.fedosov(k1.w, k2.w);
            if (wp.empty()) continue;
            FMat c = mat_wedge(m1, m2.map([&](const Form& f) { return pullback(f, g1); }));
            if (c.is_zero()) continue;
            int l = act.mul(k2.label, k1.label);
            for (auto& [w, s] : wp) r.add(Key{w, l}, s == 1 ? c : Field(s) * c);
        }
    }
    return r;
}

enum class DiffOp { Del, DelBar, D, Modular, Delta, Nabla };

namespace detail {

inline Form del_form(const Form& a) {
    Form r;
    r.at(1, 0) = a.at(0, 0).dz();
    r.at(1, 1) = a.at(0, 1).dz();
    return r;
}
inline Form delbar_form(const Form& a) {
    Form r;
    r.at(0, 1) = a.at(0, 0).dzbar();
    r.at(1, 1) = -a.at(1, 0).dzbar();
    return r;
}
// dz (g''/g') ^ a
inline Form delta_form(const Form& a, const Field& k) {
    if (k.is_zero()) return Form{};
    Form r;
    r.at(1, 0) = k * a.at(0, 0);
    r.at(1, 1) = k * a.at(0, 1);
    return r;
}

}  // namespace detail

inline Field log_jacobian(const ConformalMap& g) {
    return Field::log(Field::map_derivative(g, 1, false) * Field::map_derivative(g, 1, true));
}
inline Field schwarz_log_derivative(const ConformalMap& g) {
    return Field::map_derivative(g, 2, false) * Field::recip(Field::map_derivative(g, 1, false));
}

inline Form apply_diff(DiffOp op, const Form& a, const ConformalMap& g) {
    switch (op) {
        case DiffOp::Del: return detail::del_form(a);
        case DiffOp::DelBar: return detail::delbar_form(a);
        case DiffOp::D: return detail::del_form(a) + detail::delbar_form(a);
        case DiffOp::Modular: return log_jacobian(g) * a;
        case DiffOp::Delta: return detail::delta_form(a, schwarz_log_derivative(g));
        case DiffOp::Nabla:
            return detail::del_form(a) + detail::delbar_form(a) -
                   detail::delta_form(a, Field(0.5) * schwarz_log_derivative(g));
    }
    return a;
}

inline Element diff(DiffOp op, const Element& x, const GroupAction& act) {
    return map_coeffs(x, [&](const Key& k, const FMat& m) {
        const ConformalMap& g = act.map(k.label);
        return m.map([&](const Form& f) { return apply_diff(op, f, g); });
    });
}

// ---- universal one-forms with crossed coefficients ----

struct OneKey {
    OneWord t;
    int label = 0;
    bool operator<(const OneKey& o) const { return std::tie(label, t) < std::tie(o.label, o.t); }
};

// sum of alpha (x db y) with alpha a matrix form at a label
struct OneElement {
    int n = 1;
    std::map<OneKey, FMat> terms;

    OneElement() = default;
    explicit OneElement(int n_) : n(n_) {}
    void add(const OneKey& k, const FMat& m) {
        if (m.n != n) throw usage_error("matrix size mismatch");
        auto it = terms.find(k);
        if (it == terms.end()) {
            if (!m.is_zero()) terms.emplace(k, m);
        } else {
            it->second = it->second + m;
            if (it->second.is_zero()) terms.erase(it);
        }
    }
    bool is_zero() const { return terms.empty(); }
};

inline OneElement operator+(const OneElement& a, const OneElement& b) {
    OneElement r = a;
    for (auto& [k, m] : b.terms) r.add(k, m);
    return r;
}
inline OneElement operator*(const Field& s, const OneElement& a) {
    OneElement r(a.n);
    for (auto& [k, m] : a.terms) r.add(k, s * m);
    return r;
}
inline OneElement operator-(const OneElement& a, const OneElement& b) { return a + Field(-1.0) * b; }

// d(alpha (x) w) = (-1)^|alpha| alpha (x) dw
inline OneElement universal_d(const Element& x, const WordAlgebra& W) {
    OneElement r(x.n);
    for (auto& [k, m] : x.terms) {
        OnePoly dp = W.d(k.w);
        if (dp.empty()) continue;
        FMat pm = m.map(parity);
        for (auto& [t, s] : dp) r.add(OneKey{t, k.label}, Field(s) * pm);
    }
    return r;
}

// Element . OneElement
inline OneElement cp_mul(const Element& x, const OneElement& y, const WordAlgebra& W) {
    const GroupAction& act = W.action();
    OneElement r(x.n);
    for (auto& [k1, m1] : x.terms) {
        const ConformalMap& g1 = act.map(k1.label);
        for (auto& [k2, m2] : y.terms) {
            OnePoly op = W.left_mul(k1.w, k2.t);
            if (op.empty()) continue;
            FMat c = mat_wedge(m1, m2.map([&](const Form& f) { return pullback(f, g1); }));
            if (c.is_zero()) continue;
            int l = act.mul(k2.label, k1.label);
            for (auto& [t, s] : op) r.add(OneKey{t, l}, Field(s) * c);
        }
    }
    return r;
}

// OneElement . Element; the universal differential passes the form degree of y
inline OneElement cp_mul(const OneElement& x, const Element& y, const WordAlgebra& W, bool koszul = true) {
    const GroupAction& act = W.action();
    OneElement r(x.n);
    for (auto& [k1, m1] : x.terms) {
        const ConformalMap& g1 = act.map(k1.label);
        for (auto& [k2, m2] : y.terms) {
            OnePoly op = W.right_mul(k1.t, k2.w);
            if (op.empty()) continue;
            FMat c = mat_wedge(m1, m2.map([&](const Form& f) {
                Form p = pullback(f, g1);
                return koszul ? parity(p) : p;
            }));
            if (c.is_zero()) continue;
            int l = act.mul(k2.label, k1.label);
            for (auto& [t, s] : op) r.add(OneKey{t, l}, Field(s) * c);
        }
    }
    return r;
}

inline OneElement diff(DiffOp op, const OneElement& x, const GroupAction& act) {
    OneElement r(x.n);
    for (auto& [k, m] : x.terms) {
        const ConformalMap& g = act.map(k.label);
        r.add(k, m.map([&](const Form& f) { return apply_diff(op, f, g); }));
    }
    return r;
}

// right-hand side of the BRS variation: -Q w - A w - w A, Q = dzb d/dzb
inline OneElement brs_variation(const Element& A, const OneElement& w, const WordAlgebra& W) {
    const GroupAction& act = W.action();
    OneElement r = Field(-1.0) * diff(DiffOp::DelBar, w, act);
    r = r - cp_mul(A, w, W);
    r = r - cp_mul(w, A, W);
    return r;
}

}  // namespace ncg
