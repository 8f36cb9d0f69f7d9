#pragma once

#include <map>
#include <random>
#include <variant>

#include "algebra.hpp"

namespace ncg {

// f U*_g  ->  f U*_g (x) [g]
inline Element linear_lift(const Element& x) {
    Element r(x.n);
    for (auto& [k, m] : x.terms) {
        if (k.w != unit_word()) throw usage_error("linear lift expects a plain crossed element");
        r.add(Key{Word{k.label}, k.label}, m);
    }
    return r;
}

// drop words of order zero
inline Element positive_part(const Element& x) {
    Element r(x.n);
    for (auto& [k, m] : x.terms)
        if (word_order(k.w) >= 1) r.add(k, m);
    return r;
}
inline Element order_zero_part(const Element& x) {
    Element r(x.n);
    for (auto& [k, m] : x.terms)
        if (word_order(k.w) == 0) r.add(k, m);
    return r;
}

// adjoined unit of the tensor algebra
inline Element tensor_unit(int n, int unit_label = 0) { return Element::generator(FMat::identity(n), unit_label); }

// multiplication map back to the crossed product (words of order zero)
inline Element mu(const Element& x, const WordAlgebra& W) {
    Element r(x.n);
    for (auto& [k, m] : x.terms)
        if (W.mu(k.w)) r.add(Key{unit_word(), k.label}, m);
    return r;
}

// sampled largest absolute value of all coefficients
// global samples plus samples inside each coefficient's support box
inline double sampled_max(const Element& x, int samples = 24, unsigned seed = 1, double radius = 3) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-radius, radius);
    std::vector<cplx> pts;
    for (int i = 0; i < samples; ++i) pts.emplace_back(U(rng), U(rng));
    double m = 0;
    for (auto& [k, M] : x.terms)
        for (auto& f : M.e)
            for (auto& c : f.f) {
                if (c.is_zero()) continue;
                Program p(c);
                std::vector<cplx> local = pts;
                Box b = support_box(c);
                if (b.bounded())
                    for (int i = 0; i < samples; ++i)
                        local.emplace_back(b.x0 + (b.x1 - b.x0) * (U(rng) + radius) / (2 * radius),
                                           b.y0 + (b.y1 - b.y0) * (U(rng) + radius) / (2 * radius));
                for (auto z : local) {
                    try {
                        m = std::max(m, std::abs(p.eval(z)));
                    } catch (const domain_error&) {
                    }
                }
            }
    return m;
}

struct LiftReport {
    int dropped_order0 = 0;  // order-zero terms removed from the curvature (numerically zero)
};

// 1/2 + (c - 1/2) sum_n (-1)^n C(2n,n) q^n, q = c o c - c
inline Element lift_idempotent(const Element& e, const WordAlgebra& W, LiftReport* rep = nullptr,
                               double check_tol = 1e-10) {
    int n = e.n, u = W.action().unit();
    Element c = linear_lift(e);
    Element cc = cp_mul(c, c, W);
    Element q_full = cc - c;
    Element q0 = order_zero_part(q_full);
    if (!q0.is_zero()) {
        if (sampled_max(q0) > check_tol) throw precondition_error("input is not an idempotent");
        if (rep) rep->dropped_order0 = (int)q0.terms.size();
    }
    Element q = positive_part(q_full);
    Element half = Field(0.5) * tensor_unit(n, u);
    Element s = tensor_unit(n, u), qp = tensor_unit(n, u);
    for (int k = 1; k <= W.truncation(); ++k) {
        qp = cp_mul(qp, q, W);
        if (qp.is_zero()) break;
        double coef = binomial(2 * k, k) * (k % 2 ? -1.0 : 1.0);
        s = s + Field(coef) * qp;
    }
    return half + cp_mul(c - half, s, W);
}

struct RelInvertible {
    Element a;  // u = 1 + a
    Element b;  // u^-1 = 1 + b
};

struct InvertibleLift {
    Element u, uinv;
};

inline InvertibleLift lift_invertible(const RelInvertible& in, const WordAlgebra& W, double check_tol = 1e-10) {
    const GroupAction& act = W.action();
    int n = in.a.n, unit = act.unit();
    if (in.b.n != n) throw usage_error("certificate size mismatch");
    WordAlgebra W0(act, 0);
    Element r1 = in.a + in.b + cp_mul(in.a, in.b, W0), r2 = in.a + in.b + cp_mul(in.b, in.a, W0);
    if ((!r1.is_zero() && sampled_max(r1) > check_tol) || (!r2.is_zero() && sampled_max(r2) > check_tol))
        throw precondition_error("inverse certificate does not invert the element");
    Element one = tensor_unit(n, unit);
    InvertibleLift r;
    Element ra = linear_lift(in.a), rb = linear_lift(in.b);
    r.u = one + ra;
    // curvature terms a(h) b(i)^h U*_{ih} (x) dU_h dU_i
    Element X(n);
    for (auto& [k1, m1] : in.a.terms) {
        const ConformalMap& g1 = act.map(k1.label);
        for (auto& [k2, m2] : in.b.terms) {
            FMat c = mat_wedge(m1, m2.map([&](const Form& f) { return pullback(f, g1); }));
            X.add(Key{Word{UNIT_LETTER, k1.label, k2.label}, act.mul(k2.label, k1.label)}, c);
        }
    }
    Element s = one, xp = one;
    for (int k = 1; k <= W.truncation(); ++k) {
        xp = cp_mul(xp, X, W);
        if (xp.is_zero()) break;
        s = s + xp;
    }
    r.uinv = cp_mul(one + rb, s, W);
    return r;
}

// rho_*(f1 U*_g1 (x) ... (x) fk U*_gk) as a product of linear lifts
inline Element rho_star(const std::vector<Element>& gens, const WordAlgebra& W) {
    if (gens.empty()) throw usage_error("empty tensor word");
    Element r = linear_lift(gens[0]);
    for (size_t i = 1; i < gens.size(); ++i) r = cp_mul(r, linear_lift(gens[i]), W);
    return r;
}

// ---- collapse functionals ----

using SeriesCoeffs = std::map<Word, cplx>;
using OneFormCoeffs = std::map<NaturalKey, cplx>;

struct Tau0 {};
struct GroupCocycle1 {
    std::map<int, cplx> c;  // values on labels, additive
    cplx at(int l) const {
        auto it = c.find(l);
        return it == c.end() ? cplx{} : it->second;
    }
    // additive extension from generator values
    static GroupCocycle1 from_generators(const GroupAction& act, const std::vector<cplx>& gen_values,
                                         const std::set<int>& labels) {
        GroupCocycle1 r;
        for (int l : labels) {
            std::string nm = act.name(l);
            cplx v = 0;
            if (nm != "e") {
                size_t pos = 0;
                while (pos <= nm.size()) {
                    size_t st = nm.find('*', pos);
                    std::string tok = nm.substr(pos, st == std::string::npos ? std::string::npos : st - pos);
                    bool inv = tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1";
                    if (inv) tok = tok.substr(0, tok.size() - 3);
                    int gi = act.generator(tok);
                    int idx = -1;
                    for (int j = 0; j < act.num_generators(); ++j)
                        if (act.generator(j) == gi) idx = j;
                    cplx gv = idx >= 0 && idx < (int)gen_values.size() ? gen_values[idx] : cplx{};
                    v += inv ? -gv : gv;
                    if (st == std::string::npos) break;
                    pos = st + 1;
                }
            }
            r.c[l] = v;
        }
        return r;
    }
};
using CollapseFunctional = std::variant<Tau0, GroupCocycle1>;

inline cplx collapse(const SeriesCoeffs& x, const Tau0&, const WordAlgebra& W) {
    cplx s = 0;
    for (auto& [w, v] : x) {
        auto m = W.mu(w);
        if (m && *m == W.action().unit()) s += v;
    }
    return s;
}

inline cplx collapse(const OneFormCoeffs& x, const GroupCocycle1& psi, const WordAlgebra& W) {
    cplx s = 0;
    for (auto& [k, v] : x) {
        auto m = W.mu(k.first);
        if (!m) continue;
        if (W.bmul(*m, k.second) == W.action().unit()) s += v * psi.at(k.second);
    }
    return s;
}

inline cplx collapse(const SeriesCoeffs& x, const CollapseFunctional& f, const WordAlgebra& W) {
    if (!std::holds_alternative<Tau0>(f)) throw usage_error("series collapse needs the unit trace");
    return collapse(x, std::get<Tau0>(f), W);
}
inline cplx collapse(const OneFormCoeffs& x, const CollapseFunctional& f, const WordAlgebra& W) {
    if (!std::holds_alternative<GroupCocycle1>(f)) throw usage_error("one-form collapse needs a group cocycle");
    return collapse(x, std::get<GroupCocycle1>(f), W);
}

// constant-coefficient series (trace of each word coefficient), exact for constant data
inline SeriesCoeffs constant_trace(const Element& x) {
    SeriesCoeffs r;
    for (auto& [k, m] : x.terms)
        for (int i = 0; i < x.n; ++i) {
            const Field& f = m(i, i).at(0, 0);
            if (!f.is_const()) throw usage_error("coefficient is not constant");
            r[k.w] += f.const_value();
        }
    return r;
}

}  // namespace ncg
