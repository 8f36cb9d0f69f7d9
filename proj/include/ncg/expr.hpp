#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "conformal.hpp"

namespace ncg {

enum class Op { Const, Z, Zb, Add, Mul, Neg, Pow, Recip, Bump, BumpD, Compose, MapDer, Log };

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
    Op op = Op::Const;
    cplx c{}, d{};          // Const value; Recip denominator c*x + d
    int p = 0, q = 0;       // Pow exponent; BumpD orders; MapDer order in p
    double rp = 0, rs = 0;  // Bump radii
    cplx center{};
    bool conj = false;      // MapDer: conjugated
    std::vector<NodeP> kids;
    std::shared_ptr<const ConformalMap> map;
};

struct BumpCutoff {
    cplx center{};
    double r_plateau = 1, r_support = 2;
};

namespace detail {

inline NodeP make(Node n) { return std::make_shared<const Node>(std::move(n)); }

inline NodeP cnst(cplx v) {
    static const NodeP zero = make(Node{});
    if (v == cplx{}) return zero;
    Node n;
    n.c = v;
    return make(std::move(n));
}
inline bool is_const(const NodeP& a) { return a->op == Op::Const; }
inline bool is_zero(const NodeP& a) { return a->op == Op::Const && a->c == cplx{}; }

inline NodeP add(const std::vector<NodeP>& xs) {
    std::vector<NodeP> ks;
    cplx k = 0;
    for (auto& x : xs) {
        if (x->op == Op::Const) {
            k += x->c;
        } else if (x->op == Op::Add) {
            for (auto& y : x->kids) {
                if (y->op == Op::Const)
                    k += y->c;
                else
                    ks.push_back(y);
            }
        } else {
            ks.push_back(x);
        }
    }
    if (k != cplx{}) ks.push_back(cnst(k));
    if (ks.empty()) return cnst(0);
    if (ks.size() == 1) return ks[0];
    Node n;
    n.op = Op::Add;
    n.kids = std::move(ks);
    return make(std::move(n));
}

// order of non-constant factors is kept: a cutoff placed first guards later factors
inline NodeP mul(const std::vector<NodeP>& xs) {
    std::vector<NodeP> ks;
    cplx k = 1;
    for (auto& x : xs) {
        if (x->op == Op::Const) {
            k *= x->c;
        } else if (x->op == Op::Mul) {
            for (auto& y : x->kids) {
                if (y->op == Op::Const)
                    k *= y->c;
                else
                    ks.push_back(y);
            }
        } else {
            ks.push_back(x);
        }
    }
    if (k == cplx{}) return cnst(0);
    if (ks.empty()) return cnst(k);
    if (k != cplx{1}) ks.insert(ks.begin(), cnst(k));
    if (ks.size() == 1) return ks[0];
    Node n;
    n.op = Op::Mul;
    n.kids = std::move(ks);
    return make(std::move(n));
}

inline NodeP neg(const NodeP& a) {
    if (a->op == Op::Const) return cnst(-a->c);
    if (a->op == Op::Neg) return a->kids[0];
    Node n;
    n.op = Op::Neg;
    n.kids = {a};
    return make(std::move(n));
}

inline NodeP pow(const NodeP& a, int p) {
    if (p < 0) throw usage_error("negative integer power");
    if (p == 0) return cnst(1);
    if (p == 1) return a;
    if (a->op == Op::Const) {
        cplx r = 1;
        for (int i = 0; i < p; ++i) r *= a->c;
        return cnst(r);
    }
    Node n;
    n.op = Op::Pow;
    n.p = p;
    n.kids = {a};
    return make(std::move(n));
}

inline NodeP recip(cplx c, cplx d, const NodeP& a) {
    if (a->op == Op::Const) {
        cplx den = c * a->c + d;
        if (den == cplx{}) throw domain_error("reciprocal of zero constant");
        return cnst(1.0 / den);
    }
    Node n;
    n.op = Op::Recip;
    n.c = c;
    n.d = d;
    n.kids = {a};
    return make(std::move(n));
}

inline NodeP logn(const NodeP& a) {
    if (a->op == Op::Const) return cnst(std::log(a->c));
    Node n;
    n.op = Op::Log;
    n.kids = {a};
    return make(std::move(n));
}

inline NodeP var(Op op) {
    Node n;
    n.op = op;
    return make(std::move(n));
}

inline NodeP bump(cplx center, double rp, double rs, int p = 0, int q = 0) {
    if (!(rp > 0 && rs > rp)) throw usage_error("bump radii must satisfy 0 < r_plateau < r_support");
    Node n;
    n.op = (p == 0 && q == 0) ? Op::Bump : Op::BumpD;
    n.center = center;
    n.rp = rp;
    n.rs = rs;
    n.p = p;
    n.q = q;
    return make(std::move(n));
}

inline NodeP mapder(std::shared_ptr<const ConformalMap> m, int k, bool cj) {
    if (k == 0 && m->kind == ConformalMap::Identity) return cj ? var(Op::Zb) : var(Op::Z);
    if (k == 1 && m->kind == ConformalMap::Identity) return cnst(1);
    if (k >= 2 && m->kind == ConformalMap::Identity) return cnst(0);
    if (k >= 1 && m->kind == ConformalMap::Affine) return cnst(k == 1 ? (cj ? std::conj(m->a) : m->a) : cplx{});
    Node n;
    n.op = Op::MapDer;
    n.map = std::move(m);
    n.p = k;
    n.conj = cj;
    return make(std::move(n));
}

inline NodeP compose(const ConformalMap& g, const NodeP& a) {
    if (a->op == Op::Const) return a;
    if (g.kind == ConformalMap::Identity && g.domain.kind == Region::FullPlane) return a;
    if (a->op == Op::Compose) return compose(compose_maps(*a->map, g), a->kids[0]);
    Node n;
    n.op = Op::Compose;
    n.map = std::make_shared<const ConformalMap>(g);
    n.kids = {a};
    return make(std::move(n));
}

inline NodeP dz(const NodeP& a, bool bar, std::unordered_map<const Node*, NodeP>& memo);

inline NodeP dz_raw(const NodeP& a, bool bar, std::unordered_map<const Node*, NodeP>& memo) {
    switch (a->op) {
        case Op::Const: return cnst(0);
        case Op::Z: return cnst(bar ? 0.0 : 1.0);
        case Op::Zb: return cnst(bar ? 1.0 : 0.0);
        case Op::Add: {
            std::vector<NodeP> t;
            for (auto& k : a->kids) t.push_back(dz(k, bar, memo));
            return add(t);
        }
        case Op::Neg: return neg(dz(a->kids[0], bar, memo));
        case Op::Mul: {
            std::vector<NodeP> terms;
            for (size_t i = 0; i < a->kids.size(); ++i) {
                NodeP di = dz(a->kids[i], bar, memo);
                if (is_zero(di)) continue;
                std::vector<NodeP> f = a->kids;
                f[i] = di;
                terms.push_back(mul(f));
            }
            return add(terms);
        }
        case Op::Pow: {
            NodeP da = dz(a->kids[0], bar, memo);
            return mul({cnst(double(a->p)), pow(a->kids[0], a->p - 1), da});
        }
        case Op::Recip: {
            NodeP da = dz(a->kids[0], bar, memo);
            if (is_zero(da)) return cnst(0);
            return mul({cnst(-a->c), pow(a, 2), da});
        }
        case Op::Log: {
            NodeP da = dz(a->kids[0], bar, memo);
            return mul({recip(1, 0, a->kids[0]), da});
        }
        case Op::Bump:
        case Op::BumpD: return bump(a->center, a->rp, a->rs, a->p + (bar ? 0 : 1), a->q + (bar ? 1 : 0));
        case Op::MapDer:
            if (a->conj != bar) return cnst(0);
            return mapder(a->map, a->p + 1, a->conj);
        case Op::Compose: {
            NodeP inner = dz(a->kids[0], bar, memo);
            if (is_zero(inner)) return cnst(0);
            return mul({compose(*a->map, inner), mapder(a->map, 1, bar)});
        }
    }
    return cnst(0);
}

inline NodeP dz(const NodeP& a, bool bar, std::unordered_map<const Node*, NodeP>& memo) {
    auto it = memo.find(a.get());
    if (it != memo.end()) return it->second;
    NodeP r = dz_raw(a, bar, memo);
    memo[a.get()] = r;
    return r;
}

inline double bump_value(cplx center, double rp, double rs, cplx z) {
    double r = std::abs(z - center);
    if (r >= rs) return 0;
    if (r <= rp) return 1;
    double gx = std::exp(-1.0 / (rs - r)), gy = std::exp(-1.0 / (r - rp));
    return gx / (gx + gy);
}

// univariate series of the radial glue in s = |z - center|^2 around s0
inline Jet1 bump_series(double rp, double rs, double s0, int K) {
    Jet1 t = j_sqrt(Jet1::variable(s0, K));
    Jet1 x = (-t) + cplx(rs), y = t + cplx(-rp);
    Jet1 gx = j_exp(-j_recip(x)), gy = j_exp(-j_recip(y));
    return j_mul(gx, j_recip(gx + gy));
}

}  // namespace detail

struct EvalOptions {
    int glue_order = 8;           // highest derivative order inside bump transition zones
    bool strict_plateau = false;  // refuse transition-zone evaluation (local trace needs exact jets)
};

inline Jet2 bump_jet(cplx center, double rp, double rs, cplx z0, int K, const EvalOptions& o) {
    double s0 = std::norm(z0 - center);
    if (s0 >= rs * rs) return Jet2(z0, K);
    if (s0 <= rp * rp) return Jet2::constant(z0, 1, K);
    if (o.strict_plateau) throw precondition_error("evaluation point lies in a cutoff transition zone");
    if (K > o.glue_order) throw unsupported_error("derivative order exceeds the cutoff glue order");
    Jet2 S = j_mul(Jet2::var_z(z0, K) + Jet2::constant(z0, -center, K),
                   Jet2::var_zbar(z0, K) + Jet2::constant(z0, -std::conj(center), K));
    return compose_univariate(detail::bump_series(rp, rs, s0, K), S);
}

// Closed-form smooth function of (z, zbar).
class Field {
   public:
    Field() : n_(detail::cnst(0)) {}
    Field(cplx v) : n_(detail::cnst(v)) {}
    Field(double v) : n_(detail::cnst(v)) {}
    explicit Field(NodeP n) : n_(std::move(n)) {}

    static Field constant(cplx v) { return Field(detail::cnst(v)); }
    static Field z() { return Field(detail::var(Op::Z)); }
    static Field zbar() { return Field(detail::var(Op::Zb)); }
    static Field bump(cplx center, double rp, double rs) { return Field(detail::bump(center, rp, rs)); }
    static Field bump(const BumpCutoff& b) { return bump(b.center, b.r_plateau, b.r_support); }
    // 1/(c z + d)
    static Field recip_affine(cplx c, cplx d) { return Field(detail::recip(c, d, detail::var(Op::Z))); }
    static Field recip(const Field& x) { return Field(detail::recip(1, 0, x.n_)); }
    static Field log(const Field& x) { return Field(detail::logn(x.n_)); }
    // k-th derivative of a holomorphic map (conjugated when cj)
    static Field map_derivative(const ConformalMap& g, int k, bool cj = false) {
        return Field(detail::mapder(std::make_shared<const ConformalMap>(g), k, cj));
    }
    // expr times cutoff, cutoff first so that it guards the rest
    static Field with_cutoff(const Field& e, const BumpCutoff& b) { return bump(b) * e; }

    const NodeP& node() const { return n_; }
    bool is_zero() const { return detail::is_zero(n_); }
    bool is_const() const { return detail::is_const(n_); }
    cplx const_value() const { return n_->c; }

    friend Field operator+(const Field& a, const Field& b) { return Field(detail::add({a.n_, b.n_})); }
    friend Field operator-(const Field& a, const Field& b) { return Field(detail::add({a.n_, detail::neg(b.n_)})); }
    friend Field operator-(const Field& a) { return Field(detail::neg(a.n_)); }
    friend Field operator*(const Field& a, const Field& b) { return Field(detail::mul({a.n_, b.n_})); }
    Field& operator+=(const Field& b) { return *this = *this + b; }
    Field pow(int p) const { return Field(detail::pow(n_, p)); }
    Field conj_holomorphic_unsupported() const = delete;

    Field dz() const {
        std::unordered_map<const Node*, NodeP> m;
        return Field(detail::dz(n_, false, m));
    }
    Field dzbar() const {
        std::unordered_map<const Node*, NodeP> m;
        return Field(detail::dz(n_, true, m));
    }
    Field derivative(int p, int q) const {
        Field r = *this;
        for (int i = 0; i < p; ++i) r = r.dz();
        for (int i = 0; i < q; ++i) r = r.dzbar();
        return r;
    }

   private:
    NodeP n_;
};

using ScalarField = Field;

inline Field pullback(const Field& f, const ConformalMap& g) { return Field(detail::compose(g, f.node())); }

// Bounding box of the support (conservative).
inline Box support_box(const NodeP& a, std::unordered_map<const Node*, Box>& memo) {
    auto it = memo.find(a.get());
    if (it != memo.end()) return it->second;
    Box r;
    switch (a->op) {
        case Op::Const: r = detail::is_zero(a) ? Box::none() : Box::all(); break;
        case Op::Add:
            r = Box::none();
            for (auto& k : a->kids) r = unite(r, support_box(k, memo));
            break;
        case Op::Mul:
            r = Box::all();
            for (auto& k : a->kids) r = intersect(r, support_box(k, memo));
            break;
        case Op::Neg:
        case Op::Pow: r = support_box(a->kids[0], memo); break;
        case Op::Bump:
        case Op::BumpD: r = Box::disk(a->center, a->rs); break;
        case Op::Compose: r = preimage_box(*a->map, support_box(a->kids[0], memo)); break;
        default: r = Box::all();
    }
    memo[a.get()] = r;
    return r;
}
inline Box support_box(const Field& f) {
    std::unordered_map<const Node*, Box> m;
    return support_box(f.node(), m);
}

// Flattened DAG with lazy memoized evaluation; maps open new point contexts.
class Program {
   public:
    explicit Program(const Field& f, EvalOptions o = {}) : opts_(o) {
        Memo memo;
        nctx_ = 1;
        root_ = build(f.node(), 0, memo);
    }

    struct Work {
        std::vector<cplx> val;
        std::vector<char> done;
        std::vector<cplx> pt;
        std::vector<Jet2> jv;
    };
    Work work() const {
        Work w;
        w.val.resize(ins_.size());
        w.done.resize(ins_.size());
        w.pt.resize(nctx_);
        return w;
    }

    cplx eval(cplx z, Work& w) const {
        std::fill(w.done.begin(), w.done.end(), 0);
        w.pt[0] = z;
        return ev(root_, w);
    }
    cplx eval(cplx z) const {
        Work w = work();
        return eval(z, w);
    }
    Jet2 jet(cplx z, int K) const {
        Work w = work();
        w.jv.assign(ins_.size(), Jet2());
        w.pt[0] = z;
        return jv(root_, K, w);
    }
    size_t size() const { return ins_.size(); }

   private:
    struct Ins {
        const Node* n;
        std::vector<int> kids;
        int ctx;
        int sub = -1;  // Compose: context opened for the child
    };
    std::vector<Ins> ins_;
    std::vector<NodeP> keep_;
    int root_ = 0, nctx_ = 1;
    EvalOptions opts_;

    // structurally equal instructions and equal compositions share storage
    struct Memo {
        std::map<std::pair<const Node*, int>, int> by_ptr;
        std::map<std::string, int> by_shape;
        std::map<std::pair<std::string, int>, int> contexts;
    };

    static void put(std::string& k, const void* p, size_t n) { k.append(static_cast<const char*>(p), n); }
    static void put(std::string& k, cplx v) { put(k, &v, sizeof v); }
    static void put(std::string& k, double v) { put(k, &v, sizeof v); }
    static void put(std::string& k, int v) { put(k, &v, sizeof v); }

    static void fingerprint(std::string& k, const ConformalMap& m) {
        put(k, (int)m.kind);
        for (cplx v : {m.a, m.b, m.c, m.d}) put(k, v);
        put(k, (int)m.coeffs.size());
        for (cplx v : m.coeffs) put(k, v);
        put(k, (int)m.chain.size());
        for (auto& x : m.chain) fingerprint(k, x);
        put(k, (int)m.domain.kind);
        put(k, m.domain.center);
        put(k, m.domain.radius);
        put(k, m.domain.lo);
        put(k, m.domain.hi);
        put(k, (int)m.empty_domain);
    }

    int build(const NodeP& a, int ctx, Memo& memo) {
        auto pkey = std::make_pair(a.get(), ctx);
        auto it = memo.by_ptr.find(pkey);
        if (it != memo.by_ptr.end()) return it->second;
        const Node& n = *a;
        Ins in{a.get(), {}, ctx};
        std::string key;
        put(key, (int)n.op);
        put(key, ctx);
        put(key, n.c);
        put(key, n.d);
        put(key, n.p);
        put(key, n.q);
        put(key, n.rp);
        put(key, n.rs);
        put(key, n.center);
        put(key, (int)n.conj);
        if (n.map) fingerprint(key, *n.map);
        if (n.op == Op::Compose) {
            std::string mk;
            fingerprint(mk, *n.map);
            auto [cit, fresh] = memo.contexts.try_emplace({mk, ctx}, nctx_);
            if (fresh) ++nctx_;
            in.sub = cit->second;
            in.kids.push_back(build(n.kids[0], in.sub, memo));
        } else {
            for (auto& k : n.kids) in.kids.push_back(build(k, ctx, memo));
        }
        for (int k : in.kids) put(key, k);
        auto sit = memo.by_shape.find(key);
        if (sit != memo.by_shape.end()) {
            memo.by_ptr[pkey] = sit->second;
            return sit->second;
        }
        keep_.push_back(a);
        ins_.push_back(std::move(in));
        int id = (int)ins_.size() - 1;
        memo.by_ptr[pkey] = id;
        memo.by_shape.emplace(std::move(key), id);
        return id;
    }

    cplx ev(int i, Work& w) const {
        if (w.done[i]) return w.val[i];
        const Ins& in = ins_[i];
        const Node& n = *in.n;
        cplx z = w.pt[in.ctx], r;
        switch (n.op) {
            case Op::Const: r = n.c; break;
            case Op::Z: r = z; break;
            case Op::Zb: r = std::conj(z); break;
            case Op::Add:
                r = 0;
                for (int k : in.kids) r += ev(k, w);
                break;
            case Op::Mul:
                r = 1;
                for (int k : in.kids) {
                    cplx v = ev(k, w);
                    if (v == cplx{}) {
                        r = 0;
                        break;
                    }
                    r *= v;
                }
                break;
            case Op::Neg: r = -ev(in.kids[0], w); break;
            case Op::Pow: {
                cplx b = ev(in.kids[0], w);
                r = 1;
                for (int k = 0; k < n.p; ++k) r *= b;
                break;
            }
            case Op::Recip: {
                cplx x = ev(in.kids[0], w);
                cplx den = n.c * x + n.d;
                if (std::abs(den) <= 1e-14 * (std::abs(n.c * x) + std::abs(n.d)))
                    throw domain_error("reciprocal pole inside the support");
                r = 1.0 / den;
                break;
            }
            case Op::Log: {
                cplx x = ev(in.kids[0], w);
                if (x == cplx{}) throw domain_error("log of zero");
                r = std::log(x);
                break;
            }
            case Op::Bump: r = detail::bump_value(n.center, n.rp, n.rs, z); break;
            case Op::BumpD: {
                Jet2 j = bump_jet(n.center, n.rp, n.rs, z, n.p + n.q, opts_);
                r = j.at(n.p, n.q) * factorial(n.p) * factorial(n.q);
                break;
            }
            case Op::MapDer: {
                if (n.p == 0)
                    r = n.map->eval(z);
                else
                    r = n.map->derivative(z, n.p);
                if (n.conj) r = std::conj(r);
                break;
            }
            case Op::Compose: {
                w.pt[in.sub] = n.map->eval(z);
                r = ev(in.kids[0], w);
                break;
            }
        }
        w.val[i] = r;
        w.done[i] = 1;
        return r;
    }

    Jet2 jv(int i, int K, Work& w) const {
        if (w.done[i]) return w.jv[i];
        const Ins& in = ins_[i];
        const Node& n = *in.n;
        cplx z = w.pt[in.ctx];
        Jet2 r;
        switch (n.op) {
            case Op::Const: r = Jet2::constant(z, n.c, K); break;
            case Op::Z: r = Jet2::var_z(z, K); break;
            case Op::Zb: r = Jet2::var_zbar(z, K); break;
            case Op::Add:
                r = Jet2(z, K);
                for (int k : in.kids) r = r + jv(k, K, w);
                break;
            case Op::Mul:
                r = Jet2::constant(z, 1, K);
                for (int k : in.kids) {
                    Jet2 v = jv(k, K, w);
                    if (v.is_zero()) {
                        r = Jet2(z, K);
                        break;
                    }
                    r = j_mul(r, v);
                }
                break;
            case Op::Neg: r = -jv(in.kids[0], K, w); break;
            case Op::Pow: {
                Jet2 a = jv(in.kids[0], K, w);
                r = compose_univariate(power_series(a.c[0], n.p, K), a);
                break;
            }
            case Op::Recip: {
                Jet2 a = jv(in.kids[0], K, w);
                Jet2 D = n.c * a;
                D.c[0] += n.d;
                if (std::abs(D.c[0]) <= 1e-14 * (std::abs(n.c * a.c[0]) + std::abs(n.d)))
                    throw domain_error("reciprocal pole inside the support");
                r = compose_univariate(j_recip(Jet1::variable(D.c[0], K)), D);
                break;
            }
            case Op::Log: {
                Jet2 a = jv(in.kids[0], K, w);
                r = compose_univariate(j_log(Jet1::variable(a.c[0], K)), a);
                break;
            }
            case Op::Bump: r = bump_jet(n.center, n.rp, n.rs, z, K, opts_); break;
            case Op::BumpD:
                r = bump_jet(n.center, n.rp, n.rs, z, K + n.p + n.q, opts_).derivative(n.p, n.q);
                break;
            case Op::MapDer: {
                Jet1 W = n.map->jet(z, K + n.p);
                Jet1 D(z, K);
                for (int j = 0; j <= K; ++j) D.c[j] = W.c[j + n.p] * (factorial(j + n.p) / factorial(j));
                r = n.conj ? Jet2::from_antiholo(D, K) : Jet2::from_holo(D, K);
                break;
            }
            case Op::Compose: {
                Jet1 W = n.map->jet(z, K);
                w.pt[in.sub] = W.c[0];
                Jet2 C = jv(in.kids[0], K, w);
                if (C.is_zero()) {
                    r = Jet2(z, K);
                    break;
                }
                Jet2 dw = Jet2::from_holo(W, K), dwb = Jet2::from_antiholo(W, K);
                dw.c[0] = 0;
                dwb.c[0] = 0;
                std::vector<Jet2> pw(K + 1), pwb(K + 1);
                pw[0] = pwb[0] = Jet2::constant(z, 1, K);
                for (int k = 1; k <= K; ++k) {
                    pw[k] = j_mul(pw[k - 1], dw);
                    pwb[k] = j_mul(pwb[k - 1], dwb);
                }
                r = Jet2(z, K);
                for (int t = 0; t <= K; ++t)
                    for (int q = 0; q <= t; ++q) {
                        cplx cc = C.at(t - q, q);
                        if (cc == cplx{}) continue;
                        r = r + cc * j_mul(pw[t - q], pwb[q]);
                    }
                break;
            }
        }
        w.jv[i] = r;
        w.done[i] = 1;
        return r;
    }
};

inline cplx eval(const Field& f, cplx z) { return Program(f).eval(z); }

// c[p,q] = d_z^p d_zbar^q f(z0) / (p! q!), p + q <= K
inline Jet2 jet2_at(const Field& f, cplx z0, int K, EvalOptions o = {}) {
    if (K < 0) throw usage_error("negative jet order");
    return Program(f, o).jet(z0, K);
}

// ---- prefix-notation text form ----

inline std::string format_number(cplx v) {
    std::ostringstream os;
    os.precision(17);
    if (v.imag() == 0)
        os << v.real();
    else
        os << "(c " << v.real() << " " << v.imag() << ")";
    return os.str();
}

inline std::string to_prefix(const NodeP& a) {
    std::ostringstream os;
    os.precision(17);
    switch (a->op) {
        case Op::Const: return format_number(a->c);
        case Op::Z: return "z";
        case Op::Zb: return "zb";
        case Op::Add:
        case Op::Mul: {
            os << (a->op == Op::Add ? "(+" : "(*");
            for (auto& k : a->kids) os << " " << to_prefix(k);
            os << ")";
            return os.str();
        }
        case Op::Neg: return "(- " + to_prefix(a->kids[0]) + ")";
        case Op::Pow: os << "(^ " << to_prefix(a->kids[0]) << " " << a->p << ")"; return os.str();
        case Op::Recip:
            return "(recip " + format_number(a->c) + " " + format_number(a->d) + " " + to_prefix(a->kids[0]) + ")";
        case Op::Log: return "(log " + to_prefix(a->kids[0]) + ")";
        case Op::Bump:
            os << "(bump " << a->center.real() << " " << a->center.imag() << " " << a->rp << " " << a->rs << ")";
            return os.str();
        case Op::BumpD:
            os << "(dbump " << a->p << " " << a->q << " " << a->center.real() << " " << a->center.imag() << " "
               << a->rp << " " << a->rs << ")";
            return os.str();
        case Op::MapDer: os << "(mapder " << a->p << (a->conj ? " conj" : "") << ")"; return os.str();
        case Op::Compose: return "(pullback " + to_prefix(a->kids[0]) + ")";
    }
    return "?";
}
inline std::string to_prefix(const Field& f) { return to_prefix(f.node()); }

namespace detail {

struct PrefixParser {
    std::vector<std::string> tok;
    size_t pos = 0;

    explicit PrefixParser(const std::string& s) {
        std::string cur;
        for (char ch : s) {
            if (ch == '(' || ch == ')') {
                if (!cur.empty()) tok.push_back(cur), cur.clear();
                tok.push_back(std::string(1, ch));
            } else if (std::isspace((unsigned char)ch)) {
                if (!cur.empty()) tok.push_back(cur), cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!cur.empty()) tok.push_back(cur);
    }
    [[noreturn]] void fail(const std::string& m) const {
        throw parse_error("expr: " + m + " at token " + std::to_string(pos));
    }
    const std::string& next() {
        if (pos >= tok.size()) fail("unexpected end");
        return tok[pos++];
    }
    double number() {
        const std::string& t = next();
        try {
            size_t used = 0;
            double v = std::stod(t, &used);
            if (used != t.size()) fail("bad number '" + t + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("bad number '" + t + "'");
        }
    }
    cplx constant() {
        NodeP n = expr();
        if (n->op != Op::Const) fail("constant expected");
        return n->c;
    }
    NodeP expr() {
        const std::string& t = next();
        if (t == "z") return var(Op::Z);
        if (t == "zb") return var(Op::Zb);
        if (t == "i") return cnst(cplx(0, 1));
        if (t == ")") fail("unexpected ')'");
        if (t != "(") {
            --pos;
            return cnst(number());
        }
        std::string head = next();
        NodeP r;
        if (head == "+" || head == "*" || head == "-") {
            std::vector<NodeP> xs;
            while (pos < tok.size() && tok[pos] != ")") xs.push_back(expr());
            if (xs.empty()) fail("empty operator");
            if (head == "+")
                r = add(xs);
            else if (head == "*")
                r = mul(xs);
            else if (xs.size() == 1)
                r = neg(xs[0]);
            else {
                std::vector<NodeP> ys{xs[0]};
                for (size_t k = 1; k < xs.size(); ++k) ys.push_back(neg(xs[k]));
                r = add(ys);
            }
        } else if (head == "^") {
            NodeP b = expr();
            r = pow(b, (int)number());
        } else if (head == "c") {
            double re = number(), im = number();
            r = cnst(cplx(re, im));
        } else if (head == "recip") {
            cplx c = constant(), d = constant();
            NodeP x = (pos < tok.size() && tok[pos] != ")") ? expr() : var(Op::Z);
            r = recip(c, d, x);
        } else if (head == "bump") {
            double cx = number(), cy = number(), rp = number(), rs = number();
            r = bump(cplx(cx, cy), rp, rs);
        } else {
            fail("unknown head '" + head + "'");
        }
        if (next() != ")") fail("')' expected");
        return r;
    }
};

}  // namespace detail

inline Field parse_prefix(const std::string& s) {
    detail::PrefixParser p(s);
    NodeP n = p.expr();
    if (p.pos != p.tok.size()) p.fail("trailing tokens");
    return Field(n);
}

}  // namespace ncg
