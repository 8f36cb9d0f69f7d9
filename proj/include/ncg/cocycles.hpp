#pragma once

#include <functional>
#include <map>
#include <set>
#include <vector>

#include "algebra.hpp"
#include "quadrature.hpp"

namespace ncg {

// per-diagonal-entry values; the trace is their sum
using EntryValues = std::vector<cplx>;

inline cplx entry_sum(const EntryValues& v) {
    cplx s = 0;
    for (auto& x : v) s += x;
    return s;
}

struct FixedPointTerm {
    int label = 0;
    cplx z0{};
    int order = 0;
    Word word;
    cplx value{};
};

struct CocycleValue {
    cplx value{};
    double est_error = 0;
    bool converged = true;
    std::vector<FixedPointTerm> fixed_point_contributions;
};

struct PhiOptions {
    int pad = 0;  // extract with order m = n + pad
    Region search = Region::full();
    OrderOptions order;
    FixedPointOptions fixed;
    EvalOptions eval{8, true};
};

// Local datum of a coefficient at an isolated automorphism:
// -(1/(m-1)!) d^{m-1}(H^m a)(z0) with H^m = (z - z0)^{m-n} H^n.
inline cplx local_trace_term(const Field& f, const Automorphism& au, const PhiOptions& o) {
    if (f.is_zero()) return 0;
    if (!support_box(f).contains(au.z0)) return 0;
    int n = au.order, m = n + o.pad;
    Jet1 a = jet2_at(f, au.z0, m - 1, o.eval).pure_z();
    cplx s = 0;
    for (int j = 0; j <= m - 1; ++j) {
        int i = j - (m - n);
        if (i < 0) continue;
        s += au.h_jet[i] * a[m - 1 - j];
    }
    return -s;
}

class AutomorphismCache {
   public:
    AutomorphismCache(const GroupAction& act, const PhiOptions& o) : act_(act), o_(o) {}
    const std::vector<Automorphism>& at(int label) {
        auto it = cache_.find(label);
        if (it != cache_.end()) return it->second;
        std::vector<Automorphism> r;
        if (!act_.is_identity_germ(label)) {
            auto s = enumerate_automorphisms(act_, {label}, o_.search, o_.order, o_.fixed);
            r = s.finite;
        }
        return cache_[label] = r;
    }

   private:
    const GroupAction& act_;
    PhiOptions o_;
    std::map<int, std::vector<Automorphism>> cache_;
};

struct TraceResult {
    std::map<Word, EntryValues> by_word;
    std::vector<FixedPointTerm> terms;
    cplx total() const {
        cplx s = 0;
        for (auto& [w, v] : by_word) s += entry_sum(v);
        return s;
    }
};

// localized trace over isolated automorphisms, wordwise
inline TraceResult phi_trace(const Element& a, const GroupAction& act, const PhiOptions& o = {}) {
    TraceResult r;
    AutomorphismCache cache(act, o);
    for (auto& [k, m] : a.terms) {
        const auto& auts = cache.at(k.label);
        if (auts.empty()) continue;
        EntryValues& ev = r.by_word[k.w];
        ev.resize(a.n);
        for (auto& au : auts) {
            cplx tot = 0;
            for (int i = 0; i < a.n; ++i) {
                cplx c = local_trace_term(m(i, i).at(0, 0), au, o);
                ev[i] += c;
                tot += c;
            }
            r.terms.push_back({k.label, au.z0, au.order, k.w, tot});
        }
    }
    return r;
}

inline CocycleValue phi_value(const Element& a, const GroupAction& act, const PhiOptions& o = {}) {
    TraceResult t = phi_trace(a, act, o);
    CocycleValue v;
    v.value = t.total();
    v.fixed_point_contributions = t.terms;
    return v;
}

// ---- integrals over identity-germ labels ----

inline QuadResult integrate_field(const Field& f, const QuadratureSpec& spec) {
    if (f.is_zero()) return {};
    Box b = support_box(f);
    Program prog(f);
    return integrate_box(
        [&] {
            return [&prog, w = prog.work()](cplx z) mutable { return prog.eval(z, w); };
        },
        b, spec);
}

// integral of f dz^dzb = -2i times the euclidean integral
inline QuadResult integrate_top(const Field& f, const QuadratureSpec& spec) {
    QuadResult q = integrate_field(f, spec);
    q.value *= cplx(0, -2);
    q.est_error *= 2;
    return q;
}

struct UnitIntegral {
    std::map<Word, EntryValues> by_word;
    double est_error = 0;
    bool converged = true;
    cplx total() const {
        cplx s = 0;
        for (auto& [w, v] : by_word) s += entry_sum(v);
        return s;
    }
};

// sum over identity-germ labels of the integrals of top-degree parts, wordwise and per diagonal entry
inline UnitIntegral integrate_units(const Element& x, const GroupAction& act, const QuadratureSpec& spec) {
    UnitIntegral r;
    std::map<Word, std::vector<std::vector<NodeP>>> acc;
    for (auto& [k, m] : x.terms) {
        if (!act.is_identity_germ(k.label)) continue;
        auto& v = acc[k.w];
        v.resize(x.n);
        for (int i = 0; i < x.n; ++i) {
            const Field& f = m(i, i).at(1, 1);
            if (!f.is_zero()) v[i].push_back(f.node());
        }
    }
    for (auto& [w, v] : acc) {
        EntryValues ev(x.n);
        for (int i = 0; i < x.n; ++i) {
            QuadResult q = integrate_top(Field(detail::add(v[i])), spec);
            ev[i] = q.value;
            r.est_error += q.est_error;
            r.converged = r.converged && q.converged;
        }
        r.by_word[w] = ev;
    }
    return r;
}

inline CocycleValue as_value(const UnitIntegral& u) {
    CocycleValue v;
    v.value = u.total();
    v.est_error = u.est_error;
    v.converged = u.converged;
    return v;
}

// ---- the cyclic 2-cocycles ----

struct CocycleContext {
    const GroupAction& act;
    QuadratureSpec spec;
    WordAlgebra W;
    CocycleContext(const GroupAction& a, QuadratureSpec s) : act(a), spec(s), W(a, 0) {}
    Element mul(const Element& x, const Element& y) const { return cp_mul(x, y, W); }
    Element d(DiffOp op, const Element& x) const { return diff(op, x, act); }
};

inline CocycleValue fundamental_class(const Element& a0, const Element& a1, const Element& a2,
                                      const CocycleContext& C) {
    Element t = C.mul(a0, C.mul(C.d(DiffOp::D, a1), C.d(DiffOp::D, a2)));
    return as_value(integrate_units(t, C.act, C.spec));
}

inline CocycleValue chern1(const Element& a0, const Element& a1, const Element& a2, const CocycleContext& C) {
    Element t = C.mul(C.d(DiffOp::D, a1), C.d(DiffOp::Delta, a2)) + C.mul(C.d(DiffOp::Delta, a1), C.d(DiffOp::D, a2));
    return as_value(integrate_units(C.mul(a0, t), C.act, C.spec));
}

struct ToddValue {
    CocycleValue value;  // [G] - c1/2
    CocycleValue nabla;  // integral of a0 Na1 Na2
    CocycleValue fundamental, chern;
    double defect = 0;
};

inline ToddValue todd(const Element& a0, const Element& a1, const Element& a2, const CocycleContext& C,
                      bool check = true) {
    CocycleValue g = fundamental_class(a0, a1, a2, C), c = chern1(a0, a1, a2, C);
    ToddValue r;
    r.fundamental = g;
    r.chern = c;
    r.value.value = g.value - 0.5 * c.value;
    r.value.est_error = g.est_error + 0.5 * c.est_error;
    r.value.converged = g.converged && c.converged;
    Element t = C.mul(a0, C.mul(C.d(DiffOp::Nabla, a1), C.d(DiffOp::Nabla, a2)));
    r.nabla = as_value(integrate_units(t, C.act, C.spec));
    r.defect = std::abs(r.value.value - r.nabla.value);
    if (check && r.defect > 2 * C.spec.tol)
        throw consistency_error("Todd class: definition and nabla form disagree");
    return r;
}

using Cochain = std::function<cplx(const std::vector<Element>&)>;

// (b phi)(a0..a_{k+1})
inline cplx hochschild_b(const Cochain& phi, const std::vector<Element>& a, const CocycleContext& C) {
    int k = (int)a.size() - 2;
    if (k < 0) throw usage_error("hochschild_b needs at least two arguments");
    cplx s = 0;
    for (int i = 0; i <= k; ++i) {
        std::vector<Element> b;
        for (int j = 0; j < i; ++j) b.push_back(a[j]);
        b.push_back(C.mul(a[i], a[i + 1]));
        for (int j = i + 2; j <= k + 1; ++j) b.push_back(a[j]);
        s += (i % 2 ? -1.0 : 1.0) * phi(b);
    }
    std::vector<Element> b{C.mul(a[k + 1], a[0])};
    for (int j = 1; j <= k; ++j) b.push_back(a[j]);
    s += ((k + 1) % 2 ? -1.0 : 1.0) * phi(b);
    return s;
}

// coordinate change w = h(z): labels act by h g h^-1, coefficients pulled back by h^-1
inline std::pair<GroupAction, Element> transport_coordinates(const Element& a, const GroupAction& act,
                                                             const ConformalMap& h) {
    if (!h.mobius_like()) throw usage_error("coordinate change must be Mobius");
    auto hi = h.inverse();
    if (h.kind == ConformalMap::Mobius && h.c != cplx{}) {
        cplx pole = -h.d / h.c;
        for (auto& [k, m] : a.terms)
            for (auto& f : m.e)
                for (auto& x : f.f)
                    if (!x.is_zero() && support_box(x).contains(pole))
                        throw domain_error("coordinate change has a pole on the support");
    }
    GroupAction moved = act.conjugated(h);
    Element b = map_coeffs(a, [&](const Key&, const FMat& m) {
        return m.map([&](const Form& f) { return pullback(f, *hi); });
    });
    return {moved, b};
}

}  // namespace ncg
