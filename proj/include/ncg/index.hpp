#pragma once

#include <optional>

#include "cocycles.hpp"
#include "tensoralg.hpp"

namespace ncg {

using NaturalValues = std::map<NaturalKey, EntryValues>;

inline OneFormCoeffs trace_of(const NaturalValues& v) {
    OneFormCoeffs r;
    for (auto& [k, e] : v) r[k] = entry_sum(e);
    return r;
}
inline SeriesCoeffs trace_of(const std::map<Word, EntryValues>& v) {
    SeriesCoeffs r;
    for (auto& [k, e] : v) r[k] = entry_sum(e);
    return r;
}

namespace detail {

inline void add_natural(NaturalValues& out, const OneWord& t, const EntryValues& ev, const WordAlgebra& W,
                        cplx scale = 1) {
    for (auto& [nk, s] : W.natural(t)) {
        auto& dst = out[nk];
        dst.resize(ev.size());
        for (size_t i = 0; i < ev.size(); ++i) dst[i] += scale * s * ev[i];
    }
}

// per-term local traces for every automorphism of the term's label, in automorphism order
inline EntryValues local_entries(const FMat& m, const std::vector<Automorphism>& auts, const PhiOptions& o) {
    EntryValues ev(m.n);
    for (int i = 0; i < m.n; ++i) {
        cplx s = 0;
        for (auto& au : auts) s += local_trace_term(m(i, i).at(0, 0), au, o);
        ev[i] = s;
    }
    return ev;
}

}  // namespace detail

// localized trace of the degree-zero parts of a universal-one-form element, after the natural projection
inline NaturalValues phi_natural(const OneElement& x, const WordAlgebra& W, const PhiOptions& o = {}) {
    AutomorphismCache cache(W.action(), o);
    NaturalValues r;
    for (auto& [k, m] : x.terms) {
        const auto& auts = cache.at(k.label);
        if (auts.empty()) continue;
        detail::add_natural(r, k.t, detail::local_entries(m, auts, o), W);
    }
    return r;
}

// identity-germ integrals of top-degree parts, after the natural projection
inline NaturalValues integrate_units_natural(const OneElement& x, const WordAlgebra& W, const QuadratureSpec& spec,
                                             double* est_error = nullptr) {
    const GroupAction& act = W.action();
    std::map<OneWord, std::vector<std::vector<NodeP>>> acc;
    for (auto& [k, m] : x.terms) {
        if (!act.is_identity_germ(k.label)) continue;
        auto& v = acc[k.t];
        v.resize(x.n);
        for (int i = 0; i < x.n; ++i) {
            const Field& f = m(i, i).at(1, 1);
            if (!f.is_zero()) v[i].push_back(f.node());
        }
    }
    NaturalValues r;
    for (auto& [t, v] : acc) {
        EntryValues ev(x.n);
        for (int i = 0; i < x.n; ++i) {
            QuadResult q = integrate_top(Field(detail::add(v[i])), spec);
            ev[i] = q.value;
            if (est_error) *est_error += q.est_error;
        }
        detail::add_natural(r, t, ev, W);
    }
    return r;
}

struct PairingResult {
    std::map<Word, EntryValues> series;  // even case
    NaturalValues one_form;              // odd case
    cplx phi_part{}, integral_part{};    // traces of the two terms
    std::optional<cplx> collapsed;
    double est_error = 0;
    int dropped = 0;
};

struct PairingOptions {
    int truncation = 4;
    PhiOptions phi;
    QuadratureSpec quad;
};

inline const cplx two_pi_i(0, 2 * M_PI);

// Phi(e~) - (1/2 pi i) int e~ Ne~ Ne~
inline PairingResult pair_even(const Element& e, const GroupAction& act, const PairingOptions& o,
                               const std::optional<CollapseFunctional>& phi = std::nullopt) {
    WordAlgebra W(act, o.truncation);
    LiftReport rep;
    Element et = lift_idempotent(e, W, &rep);
    PairingResult r;
    r.dropped = rep.dropped_order0;
    TraceResult t = phi_trace(et, act, o.phi);
    Element ne = diff(DiffOp::Nabla, et, act);
    Element tri = cp_mul(et, cp_mul(ne, ne, W), W);
    UnitIntegral I = integrate_units(tri, act, o.quad);
    r.est_error = I.est_error / (2 * M_PI);
    for (auto& [w, v] : t.by_word) {
        auto& dst = r.series[w];
        dst.resize(e.n);
        for (int i = 0; i < e.n; ++i) dst[i] += v[i];
        r.phi_part += entry_sum(v);
    }
    for (auto& [w, v] : I.by_word) {
        auto& dst = r.series[w];
        dst.resize(e.n);
        for (int i = 0; i < e.n; ++i) dst[i] -= v[i] / two_pi_i;
        r.integral_part -= entry_sum(v) / two_pi_i;
    }
    if (phi) r.collapsed = collapse(trace_of(r.series), *phi, W);
    return r;
}

// Phi(u~^-1 du~)/sqrt(2 pi i) - int u~^-1 Nu~ Nu~^-1 du~ / (2 (2 pi i)^{3/2})
inline PairingResult pair_odd(const RelInvertible& u, const GroupAction& act, const PairingOptions& o,
                              const std::optional<CollapseFunctional>& psi = std::nullopt) {
    WordAlgebra W(act, o.truncation);
    InvertibleLift L = lift_invertible(u, W);
    OneElement du = universal_d(L.u, W);
    cplx s1 = std::sqrt(two_pi_i), s3 = s1 * two_pi_i;
    PairingResult r;
    NaturalValues P = phi_natural(cp_mul(L.uinv, du, W), W, o.phi);
    Element nu = diff(DiffOp::Nabla, L.u, act), nui = diff(DiffOp::Nabla, L.uinv, act);
    OneElement integrand = cp_mul(cp_mul(L.uinv, cp_mul(nu, nui, W), W), du, W);
    double err = 0;
    NaturalValues I = integrate_units_natural(integrand, W, o.quad, &err);
    r.est_error = err / std::abs(2.0 * s3);
    for (auto& [k, v] : P) {
        auto& dst = r.one_form[k];
        dst.resize(u.a.n);
        for (int i = 0; i < u.a.n; ++i) dst[i] += v[i] / s1;
        r.phi_part += entry_sum(v) / s1;
    }
    for (auto& [k, v] : I) {
        auto& dst = r.one_form[k];
        dst.resize(u.a.n);
        for (int i = 0; i < u.a.n; ++i) dst[i] -= v[i] / (2.0 * s3);
        r.integral_part -= entry_sum(v) / (2.0 * s3);
    }
    if (psi) r.collapsed = collapse(trace_of(r.one_form), *psi, W);
    return r;
}

// sum over isolated automorphisms, automorphism-major traversal
inline NaturalValues anomaly_delta0(const OneElement& w, const WordAlgebra& W, const PhiOptions& o = {}) {
    const GroupAction& act = W.action();
    std::set<int> labels;
    for (auto& [k, m] : w.terms) labels.insert(k.label);
    AutomorphismSet S = enumerate_automorphisms(act, labels, o.search, o.order, o.fixed);
    // local values per (term, automorphism), then summed per term in automorphism order
    std::map<OneKey, std::vector<EntryValues>> per;
    for (auto& au : S.finite)
        for (auto& [k, m] : w.terms) {
            if (k.label != au.label) continue;
            EntryValues ev(w.n);
            for (int i = 0; i < w.n; ++i) ev[i] = local_trace_term(m(i, i).at(0, 0), au, o);
            per[k].push_back(ev);
        }
    NaturalValues r;
    for (auto& [k, m] : w.terms) {
        auto it = per.find(k);
        if (it == per.end()) continue;
        EntryValues tot(w.n);
        for (int i = 0; i < w.n; ++i) {
            cplx s = 0;
            for (auto& ev : it->second) s += ev[i];
            tot[i] = s;
        }
        detail::add_natural(r, k.t, tot, W);
    }
    return r;
}

struct Delta1Result {
    OneFormCoeffs explicit_form, intrinsic_form;
    double defect = 0;
    double est_error = 0;
};

// (1/pi) sum over pairs with hg an identity germ of the integral of (d - g''/2g') A(g) . w(h)(g(z)),
// checked against -(1/2 pi i) int N(A) w
inline Delta1Result anomaly_delta1(const Element& A, const OneElement& w, const WordAlgebra& W,
                                   const QuadratureSpec& spec, bool check = true) {
    const GroupAction& act = W.action();
    Delta1Result r;
    int n = A.n;
    for (auto& [k, m] : A.terms)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const Form& f = m(i, j);
                if (!f.at(1, 0).is_zero() || !f.at(1, 1).is_zero() || !f.at(0, 0).is_zero())
                    throw usage_error("gauge field must be a (0,1)-form");
            }
    for (auto& [kA, mA] : A.terms) {
        int g = kA.label;
        const ConformalMap& gm = act.map(g);
        Field half_k = Field(0.5) * schwarz_log_derivative(gm);
        for (auto& [kw, mw] : w.terms) {
            int h = kw.label;
            if (!act.is_identity_germ(act.mul(h, g))) continue;
            OnePoly op = W.left_mul(kA.w, kw.t);
            if (op.empty()) continue;
            // entries (i,k) of the twisted derivative and (k,i) of w, evaluated directly
            std::vector<std::pair<Program, Program>> pairs;
            Box box = Box::none();
            for (int i = 0; i < n; ++i)
                for (int kk = 0; kk < n; ++kk) {
                    const Field& a = mA(i, kk).at(0, 1);
                    const Field& om = mw(kk, i).at(0, 0);
                    if (a.is_zero() || om.is_zero()) continue;
                    Field twisted = a.dz() - half_k * a;
                    if (twisted.is_zero()) continue;
                    pairs.emplace_back(Program(twisted), Program(om));
                    box = unite(box, support_box(a));
                }
            if (pairs.empty()) continue;
            auto make = [&] {
                return [&pairs, &gm](cplx z) {
                    cplx s = 0;
                    for (auto& [P, Q] : pairs) {
                        cplx v = P.eval(z);
                        if (v == cplx{}) continue;
                        s += v * Q.eval(gm.eval(z));
                    }
                    return s;
                };
            };
            QuadResult q = integrate_box(make, box, spec);
            r.est_error += q.est_error / M_PI;
            for (auto& [t, s] : op)
                for (auto& [nk, c] : W.natural(t)) r.explicit_form[nk] += s * c * q.value / M_PI;
        }
    }
    Element nA = diff(DiffOp::Nabla, A, act);
    double err = 0;
    NaturalValues I = integrate_units_natural(cp_mul(nA, w, W), W, spec, &err);
    r.est_error += err / (2 * M_PI);
    for (auto& [k, v] : I) r.intrinsic_form[k] = -entry_sum(v) / two_pi_i;
    std::set<NaturalKey> keys;
    for (auto& [k, v] : r.explicit_form) keys.insert(k);
    for (auto& [k, v] : r.intrinsic_form) keys.insert(k);
    for (auto& k : keys) {
        cplx a = r.explicit_form.count(k) ? r.explicit_form[k] : cplx{};
        cplx b = r.intrinsic_form.count(k) ? r.intrinsic_form[k] : cplx{};
        r.defect = std::max(r.defect, std::abs(a - b));
    }
    if (check && r.defect > 2 * spec.tol) throw consistency_error("anomaly: explicit and intrinsic forms disagree");
    return r;
}

}  // namespace ncg
