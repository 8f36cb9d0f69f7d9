#pragma once

#include <chrono>
#include <sstream>
#include <string>

#include "dist.hpp"
#include "scenarios.hpp"

namespace ncg {

struct CheckResult {
    std::string name;
    bool pass = false;
    double value = 0;      // worst defect observed
    double threshold = 0;
    double seconds = 0;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 7;
    double samples = 1.0;  // multiplier on sample counts
    QuadratureSpec quad{1e-6, 12, 1};
    int bott_truncation = 2;
    int count(int full) const { return std::max(1, (int)std::lround(full * samples)); }
};

namespace detail {

template <class F>
CheckResult timed(const std::string& name, F&& body) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    try {
        r = body();
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("error: ") + e.what();
    }
    r.name = name;
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

inline CheckResult bounded(double worst, double thr, std::string detail = {}) {
    CheckResult r;
    r.value = worst;
    r.threshold = thr;
    r.pass = worst < thr && std::isfinite(worst);
    r.detail = std::move(detail);
    return r;
}

inline Element parity(const Element& x) {
    return map_coeffs(x, [](const Key&, const FMat& m) { return m.map([](const Form& f) { return parity(f); }); });
}

inline double sampled_max(const Element& x) { return ncg::sampled_max(x, 24, 3, 2.0); }

}  // namespace detail

// Phi(f U_g) for a dilation against f(0)/(1 - lambda)
inline CheckResult check_lefschetz(const VerifyOptions& o) {
    return detail::timed("lefschetz_n1", [&] {
        Rng rng(o.seed);
        double worst = 0;
        for (cplx lam : {cplx(2, 0), cplx(0, 1), cplx(0.5, 0.5)}) {
            GroupAction G = GroupAction::mobius({"g"}, {ConformalMap::affine(lam, 0)});
            cplx c0 = uniform_c(rng, 1), c1 = uniform_c(rng, 1), c2 = uniform_c(rng, 1);
            Field f = Field::bump(0, 0.5, 1) * (Field(c0) + Field(c1) * Field::z() + Field(c2) * Field::zbar());
            cplx v = phi_value(Element::generator(FMat::scalar(1, f), G.generator(0)), G).value;
            worst = std::max(worst, std::abs(v - c0 / (1.0 - lam)));
        }
        return detail::bounded(worst, 1e-9);
    });
}

// closed forms for orders two and three at z0 = 0 from map derivatives and holomorphic jets of a
inline cplx closed_form_order2(const std::vector<cplx>& gd, cplx a, cplx da) {
    return 2.0 / gd[2] * (gd[3] / gd[2] / 3.0 * a - da);
}
inline cplx closed_form_order3(const std::vector<cplx>& gd, cplx a, cplx da, cplx d2a) {
    cplx r4 = gd[4] / gd[3];
    return 3.0 / gd[3] * (gd[5] / gd[3] / 10.0 * a - r4 * r4 / 8.0 * a + r4 / 2.0 * da - d2a);
}

inline CheckResult check_higher_order(const VerifyOptions& o) {
    return detail::timed("higher_order_expansions", [&] {
        Rng rng(o.seed + 1);
        double worst = 0, eps = 0.3;
        std::ostringstream det;
        for (int n : {2, 3}) {
            std::vector<cplx> g = n == 2 ? std::vector<cplx>{0, 1, 1} : std::vector<cplx>{0, 1, 0, 1, eps};
            std::vector<cplx> gd(6, 0);  // derivatives at 0
            double fact = 1;
            for (int k = 0; k < 6; ++k) {
                if (k > 0) fact *= k;
                if (k < (int)g.size()) gd[k] = g[k] * fact;
            }
            GroupAction G = GroupAction::free({"g"}, {ConformalMap::poly(g).with_domain(Region::disk(0, 0.5))});
            for (int t = 0; t < 5; ++t) {
                std::vector<cplx> c;
                Field f = random_holo_poly(rng, c, 0.1, 0.2, 3);
                Field fz = f + Field::bump(0, 0.1, 0.2) * Field(uniform_c(rng, 1)) * Field::zbar();
                cplx v = phi_value(Element::generator(FMat::scalar(1, fz), G.generator(0)), G).value;
                cplx ref = n == 2 ? closed_form_order2(gd, c[0], c[1]) : closed_form_order3(gd, c[0], c[1], 2.0 * c[2]);
                worst = std::max(worst, std::abs(v - ref));
            }
        }
        return detail::bounded(worst, 1e-9, det.str());
    });
}

inline CheckResult check_trace_property(const VerifyOptions& o, int n = 100) {
    return detail::timed("trace_property", [&] {
        Rng rng(o.seed + 2);
        GroupAction G = trace_group();
        auto labels = trace_labels(G);
        WordAlgebra W(G, 0);
        double worst = 0, scale = 0;
        for (int i = 0; i < o.count(n); ++i) {
            Element a = random_trace_element(rng, G, labels), b = random_trace_element(rng, G, labels);
            cplx ab = phi_value(cp_mul(a, b, W), G).value, ba = phi_value(cp_mul(b, a, W), G).value;
            worst = std::max(worst, std::abs(ab - ba));
            scale = std::max(scale, std::abs(ab));
        }
        return detail::bounded(worst, 1e-9, "max|value|=" + std::to_string(scale));
    });
}

inline ConformalMap random_mobius(Rng& rng) {
    cplx u = uniform_c(rng, 1) / std::sqrt(2.0);
    return ConformalMap::mobius(1.0 + 0.3 * u, 0.5 * u, 0.05 * u, 1.0);
}

inline CheckResult check_coordinate_invariance(const VerifyOptions& o, int n = 20) {
    return detail::timed("coordinate_invariance", [&] {
        Rng rng(o.seed + 3);
        GroupAction G = trace_group();
        auto labels = trace_labels(G);
        double worst = 0, scale = 0;
        for (int i = 0; i < o.count(n); ++i) {
            Element a = random_trace_element(rng, G, labels);
            ConformalMap h = random_mobius(rng);
            auto [G2, b] = transport_coordinates(a, G, h);
            cplx va = phi_value(a, G).value;
            worst = std::max(worst, std::abs(va - phi_value(b, G2).value));
            scale = std::max(scale, std::abs(va));
        }
        return detail::bounded(worst, 1e-9, "max|value|=" + std::to_string(scale));
    });
}

inline CheckResult check_padding(const VerifyOptions& o, int n = 10) {
    return detail::timed("order_padding", [&] {
        Rng rng(o.seed + 4);
        GroupAction T = trace_group();
        auto labels = trace_labels(T);
        GroupAction P = GroupAction::free(
            {"g"}, {ConformalMap::poly({0, 1, 0, 1, 0.3}).with_domain(Region::disk(0, 0.5))});
        double worst = 0;
        auto compare = [&](const Element& a, const GroupAction& G) {
            TraceResult base = phi_trace(a, G);
            for (int pad : {1, 2}) {
                PhiOptions po;
                po.pad = pad;
                TraceResult t = phi_trace(a, G, po);
                if (t.terms.size() != base.terms.size()) throw consistency_error("padding changed the term list");
                for (size_t i = 0; i < t.terms.size(); ++i)
                    worst = std::max(worst, std::abs(t.terms[i].value - base.terms[i].value));
            }
        };
        for (int i = 0; i < o.count(n); ++i) {
            compare(random_trace_element(rng, T, labels), T);
            std::vector<cplx> c;
            Field f = random_holo_poly(rng, c, 0.1, 0.2, 4) + random_bumped_poly(rng, 0, 0.1, 0.2, 2);
            compare(Element::generator(FMat::scalar(1, f), P.generator(0)), P);
        }
        return detail::bounded(worst, 1e-10);
    });
}

struct CocycleLawResults {
    CheckResult laws, todd;
};

inline CocycleLawResults check_cocycle_laws(const VerifyOptions& o, int n = 20) {
    CocycleLawResults out;
    double todd_worst = 0;
    out.laws = detail::timed("cocycle_laws", [&] {
        Rng rng(o.seed + 5);
        GroupAction G = cocycle_group();
        CocycleContext C(G, o.quad);
        double worst = 0;
        for (int i = 0; i < o.count(n); ++i) {
            std::vector<Element> a;
            for (int k = 0; k < 4; ++k) a.push_back(random_cocycle_element(rng, G));
            std::vector<ToddValue> rec;
            auto record = [&](const std::vector<Element>& x) {
                rec.push_back(todd(x[0], x[1], x[2], C, false));
                todd_worst = std::max(todd_worst, rec.back().defect);
                return rec.back().fundamental.value;
            };
            cplx bg = hochschild_b(record, a, C);
            size_t k = 0;
            cplx bc = hochschild_b([&](const std::vector<Element>&) { return rec[k++].chern.value; }, a, C);
            k = 0;
            cplx bt = hochschild_b([&](const std::vector<Element>&) { return rec[k++].value.value; }, a, C);
            worst = std::max({worst, std::abs(bg), std::abs(bc), std::abs(bt)});
            ToddValue t = todd(a[0], a[1], a[2], C, false), r = todd(a[2], a[0], a[1], C, false);
            todd_worst = std::max({todd_worst, t.defect, r.defect});
            worst = std::max({worst, std::abs(t.fundamental.value - r.fundamental.value),
                              std::abs(t.chern.value - r.chern.value), std::abs(t.value.value - r.value.value)});
        }
        return detail::bounded(worst, 4 * o.quad.tol);
    });
    out.todd = detail::bounded(todd_worst, 2 * o.quad.tol);
    out.todd.name = "todd_dual_path";
    if (!out.laws.detail.empty()) {
        out.todd.pass = false;
        out.todd.detail = out.laws.detail;
    }
    return out;
}

// -(1/2 pi i) int tr(P dP dP) for the stereographic projector, by central differences on a grid
inline double bott_degree_oracle(double rp = 1, double rs = 2) {
    auto bump = [&](double r) {
        if (r <= rp) return 1.0;
        if (r >= rs) return 0.0;
        double t = (r - rp) / (rs - rp);
        auto f = [](double x) { return x > 0 ? std::exp(-1 / x) : 0.0; };
        return f(1 - t) / (f(1 - t) + f(t));
    };
    using M = std::array<cplx, 4>;
    auto P = [&](double x, double y) {
        cplx z(x, y);
        double c = bump(std::abs(z)), nn = std::norm(z) + c * c;
        return M{std::norm(z) / nn, z * c / nn, std::conj(z) * c / nn, c * c / nn};
    };
    auto mul = [](const M& a, const M& b) {
        return M{a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
                 a[2] * b[1] + a[3] * b[3]};
    };
    int N = 600;
    double L = rs + 0.2, h = 2 * L / N, e = 1e-5;
    cplx s = 0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            double x = -L + (i + 0.5) * h, y = -L + (j + 0.5) * h;
            M p = P(x, y), px, py;
            M a = P(x + e, y), b = P(x - e, y), c = P(x, y + e), d = P(x, y - e);
            for (int k = 0; k < 4; ++k) px[k] = (a[k] - b[k]) / (2 * e), py[k] = (c[k] - d[k]) / (2 * e);
            M u = mul(p, mul(px, py)), v = mul(p, mul(py, px));
            s += (u[0] + u[3] - v[0] - v[3]) * h * h;
        }
    // tr(P dP dP) = tr(P[Px,Py]) dx^dy
    return (-s / cplx(0, 2 * M_PI)).real();
}

inline CheckResult check_bott(const VerifyOptions& o) {
    return detail::timed("bott_integrality", [&] {
        GroupAction G = GroupAction::trivial();
        PairingOptions po;
        po.truncation = o.bott_truncation;
        po.quad = o.quad;
        PairingResult r = pair_even(bott_projector(), G, po, CollapseFunctional{Tau0{}});
        double oracle = bott_degree_oracle();
        double sign = oracle > 0 ? 1 : -1;
        double worst = std::abs(*r.collapsed - sign);
        FMat c(2);
        c(0, 0) = Form::zero_form(1.0);
        PairingResult z = pair_even(Element::generator(c, 0), G, po, CollapseFunctional{Tau0{}});
        bool exact_zero = *z.collapsed == cplx{};
        std::ostringstream det;
        det << "collapsed=" << r.collapsed->real() << " oracle=" << oracle << " constant=" << z.collapsed->real();
        CheckResult res = detail::bounded(worst, 1e-4, det.str());
        res.pass = res.pass && exact_zero && std::abs(oracle - sign) < 0.05;
        return res;
    });
}

inline double max_entry_gap(const NaturalValues& a, const NaturalValues& b, int off) {
    double worst = 0;
    for (auto& [k, v] : a)
        for (size_t i = 0; i < v.size(); ++i) {
            auto it = b.find(k);
            cplx w = it == b.end() ? cplx{} : it->second[i + off];
            if (v[i] != w) worst = std::max(worst, std::max(std::abs(v[i] - w), 1e-300));
        }
    return worst;
}

inline CheckResult check_odd_pairing(const VerifyOptions& o) {
    return detail::timed("odd_pairing", [&] {
        Rng rng(o.seed + 6);
        GroupAction G = trace_group();
        auto labels = trace_labels(G);
        PairingOptions po;
        po.truncation = 2;
        po.quad = o.quad;
        std::set<int> ls(labels.begin(), labels.end());
        for (int l : std::vector<int>(ls.begin(), ls.end()))
            for (int m : std::vector<int>(ls.begin(), ls.end())) ls.insert(G.mul(l, m));
        ls.insert(G.unit());
        CollapseFunctional psi = GroupCocycle1::from_generators(G, {1.0, 0.5}, ls);
        std::ostringstream det;
        // trivial element
        PairingResult one = pair_odd({Element(2), Element(2)}, G, po, psi);
        bool exact_one = one.one_form.empty() && *one.collapsed == cplx{};
        // homotopy constancy
        Element x = random_trace_element(rng, G, labels, 2);
        std::vector<cplx> vals;
        for (double t : {0.0, 0.25, 0.5, 1.0}) vals.push_back(*pair_odd(nilpotent_invertible(x, t), G, po, psi).collapsed);
        double drift = 0;
        for (auto v : vals) drift = std::max(drift, std::abs(v - vals[0]));
        // block additivity per diagonal entry
        RelInvertible u = nilpotent_invertible(x, 1.0), v = nilpotent_invertible(random_trace_element(rng, G, labels, 2), 1.0);
        PairingResult pu = pair_odd(u, G, po), pv = pair_odd(v, G, po), puv = pair_odd(block_diag(u, v), G, po);
        double gap = 0, entry_scale = 0;
        for (auto& [k, w] : puv.one_form) {
            auto iu = pu.one_form.find(k), iv = pv.one_form.find(k);
            for (int i = 0; i < 4; ++i) {
                cplx ref = i < 2 ? (iu == pu.one_form.end() ? cplx{} : iu->second[i])
                                 : (iv == pv.one_form.end() ? cplx{} : iv->second[i - 2]);
                entry_scale = std::max(entry_scale, std::abs(w[i]));
                if (w[i] != ref) gap = std::max(gap, std::max(std::abs(w[i] - ref), 1e-300));
            }
        }
        det << "unit_exact=" << exact_one << " value=" << vals.back().real() << "," << vals.back().imag() << " drift=" << drift << " block_gap=" << gap << " max|entry|=" << entry_scale;
        CheckResult r = detail::bounded(drift, 1e-6, det.str());
        r.pass = r.pass && exact_one && gap == 0;
        return r;
    });
}

inline OneElement random_one_element(Rng& rng, const GroupAction& G, const WordAlgebra& W,
                                     const std::function<Element(Rng&)>& gen) {
    Element x = linear_lift(gen(rng)), y = linear_lift(gen(rng));
    return cp_mul(x, universal_d(y, W), W) + universal_d(tensor_unit(1, G.unit()) + x, W);
}

struct AnomalyResults {
    CheckResult delta0, delta1;
};

inline CheckResult check_anomaly(const VerifyOptions& o, int n = 10) {
    return detail::timed("anomaly_consistency", [&] {
        Rng rng(o.seed + 7);
        double gap0 = 0, worst1 = 0;
        {
            GroupAction G = trace_group();
            auto labels = trace_labels(G);
            WordAlgebra W(G, 1);
            for (int i = 0; i < o.count(n); ++i) {
                OneElement w = random_one_element(rng, G, W, [&](Rng& r) { return random_trace_element(r, G, labels, 2); });
                NaturalValues a = phi_natural(w, W), b = anomaly_delta0(w, W);
                gap0 = std::max(gap0, std::max(max_entry_gap(a, b, 0), max_entry_gap(b, a, 0)));
            }
        }
        {
            GroupAction G = cocycle_group();
            WordAlgebra W(G, 1);
            std::vector<int> labels{G.unit(), G.parse_label("p"), G.parse_label("p^-1")};
            for (int i = 0; i < o.count(n); ++i) {
                OneElement w = random_one_element(rng, G, W, [&](Rng& r) { return random_cocycle_element(r, G); });
                Element A(1);
                for (int t = 0; t < 2; ++t) {
                    int l = labels[std::uniform_int_distribution<int>(0, 2)(rng)];
                    FMat m(1);
                    m(0, 0) = Form::of(0, 1, random_bumped_poly(rng, uniform_c(rng, 0.3), 0.5, 1.0));
                    A.add(Key{Word{l}, l}, m);
                }
                Delta1Result d = anomaly_delta1(A, w, W, o.quad, false);
                worst1 = std::max(worst1, d.defect);
            }
        }
        std::ostringstream det;
        det << "delta0_gap=" << gap0 << " delta1_defect=" << worst1;
        CheckResult r = detail::bounded(worst1, 2 * o.quad.tol, det.str());
        r.pass = r.pass && gap0 == 0;
        return r;
    });
}

inline CheckResult check_distributions(const VerifyOptions& o) {
    return detail::timed("distribution_identities", [&] {
        QuadratureSpec q = o.quad;
        std::ostringstream det;
        cplx z0(0.3, 0.1);
        Field phi = Field::bump(z0, 0.3, 0.8) * (Field(1.0) + Field(0.5) * Field::zbar() + Field::z() * Field::z());
        double dol = check_dolbeault(z0, phi, q).defect;
        Field phi2 = Field::bump(0, 0.3, 0.8) * (Field(1.0) + Field::z() + Field::zbar() * Field::zbar());
        double cov2 = check_covariance(2, ConformalMap::affine(2, 0), 0, phi2, q).defect;
        Field phi3 = Field::bump(0.05, 0.2, 0.5) * (Field(1.0) + Field(cplx(0.5, 0.2)) * Field::z());
        double cov3 = check_covariance(3, ConformalMap::mobius(1, 0, 1, 1), 0, phi3, q).defect;
        cplx c(0.7, -0.4);
        cplx base = pair_kernel({2, 0}, phi2, q).value, moved = pair_kernel({2, 0, c}, phi2, q).value;
        double shift = std::abs(moved - base - c * eval(phi2, 0));
        det << "dolbeault=" << dol << " cov2=" << cov2 << " cov3=" << cov3 << " shift=" << shift;
        CheckResult r;
        r.value = std::max({dol / 1e-5, cov2 / 1e-5, cov3 / 1e-4, shift / 1e-8});
        r.threshold = 1;
        r.pass = dol < 1e-5 && cov2 < 1e-5 && cov3 < 1e-4 && shift < 1e-8;
        r.detail = det.str();
        return r;
    });
}

inline CheckResult check_lifting(const VerifyOptions&) {
    return detail::timed("lifting_exactness", [&] {
        GroupAction G = GroupAction::cyclic(2, "s", ConformalMap::affine(-1, 0));
        int s = G.generator(0), e = G.unit();
        auto U = [&](int n, int i, int j, int l, cplx c) {
            FMat m(n);
            m(i, j) = Form::zero_form(Field(c));
            return Element::generator(m, l);
        };
        std::vector<Element> idem{
            U(1, 0, 0, e, 0.5) + U(1, 0, 0, s, 0.5),
            U(1, 0, 0, e, 0.5) + U(1, 0, 0, s, -0.5),
            U(2, 0, 0, e, 1) + U(2, 0, 1, s, 1),
        };
        std::vector<RelInvertible> inv{
            {U(1, 0, 0, s, 1) - U(1, 0, 0, e, 1), U(1, 0, 0, s, 1) - U(1, 0, 0, e, 1)},
            {U(2, 0, 1, s, 2), U(2, 0, 1, s, -2)},
            {U(2, 0, 1, s, 1) + U(2, 1, 0, s, 1) - U(2, 0, 0, e, 1) - U(2, 1, 1, e, 1),
             U(2, 0, 1, s, 1) + U(2, 1, 0, s, 1) - U(2, 0, 0, e, 1) - U(2, 1, 1, e, 1)},
        };
        size_t residual = 0;
        for (int L : {2, 3, 4}) {
            WordAlgebra W(G, L);
            for (auto& x : idem) {
                Element et = lift_idempotent(x, W);
                residual += (cp_mul(et, et, W) - et).terms.size();
            }
            for (auto& u : inv) {
                InvertibleLift l = lift_invertible(u, W);
                Element one = tensor_unit(u.a.n, e);
                residual += (cp_mul(l.u, l.uinv, W) - one).terms.size();
                residual += (cp_mul(l.uinv, l.u, W) - one).terms.size();
            }
        }
        CheckResult r = detail::bounded((double)residual, 0.5, "nonzero residual terms=" + std::to_string(residual));
        return r;
    });
}

inline CheckResult check_differentials(const VerifyOptions& o, int n = 50) {
    return detail::timed("differential_structure", [&] {
        Rng rng(o.seed + 8);
        GroupAction G = cocycle_group();
        std::vector<int> labels{G.unit(), G.parse_label("p"), G.parse_label("p^-1"), G.parse_label("p^2")};
        WordAlgebra W(G, 0);
        double worst = 0;
        auto D = [&](DiffOp op, const Element& x) { return diff(op, x, G); };
        for (int i = 0; i < o.count(n); ++i) {
            Element x = random_form_element(rng, G, labels), y = random_form_element(rng, G, labels);
            for (DiffOp op : {DiffOp::D, DiffOp::Del, DiffOp::DelBar, DiffOp::Delta, DiffOp::Nabla})
                worst = std::max(worst, detail::sampled_max(D(op, D(op, x))));
            Element xy = cp_mul(x, y, W), px = detail::parity(x);
            for (DiffOp op : {DiffOp::D, DiffOp::Delta}) {
                Element lhs = D(op, xy), rhs = cp_mul(D(op, x), y, W) + cp_mul(px, D(op, y), W);
                worst = std::max(worst, detail::sampled_max(lhs - rhs));
            }
            Element lhs = D(DiffOp::Modular, xy),
                    rhs = cp_mul(D(DiffOp::Modular, x), y, W) + cp_mul(x, D(DiffOp::Modular, y), W);
            worst = std::max(worst, detail::sampled_max(lhs - rhs));
        }
        return detail::bounded(worst, 1e-9);
    });
}

// all acceptance checks in order
inline std::vector<CheckResult> run_all(const VerifyOptions& o) {
    std::vector<CheckResult> r;
    r.push_back(check_lefschetz(o));
    r.push_back(check_higher_order(o));
    r.push_back(check_trace_property(o));
    r.push_back(check_coordinate_invariance(o));
    r.push_back(check_padding(o));
    CocycleLawResults c = check_cocycle_laws(o);
    r.push_back(c.laws);
    r.push_back(c.todd);
    r.push_back(check_bott(o));
    r.push_back(check_odd_pairing(o));
    r.push_back(check_anomaly(o));
    r.push_back(check_distributions(o));
    r.push_back(check_lifting(o));
    r.push_back(check_differentials(o));
    return r;
}

}  // namespace ncg
