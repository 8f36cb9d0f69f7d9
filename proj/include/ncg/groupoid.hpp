#pragma once

#include <Eigen/Eigenvalues>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "conformal.hpp"

namespace ncg {

// fixed-point search settings
struct FixedPointOptions {
    int grid = 32;
    double newton_tol = 1e-12;
    int newton_iters = 60;
    double merge_tol = 1e-9;
};

namespace detail {

inline void merge_root(std::vector<cplx>& out, cplx z, double tol) {
    for (auto& w : out)
        if (std::abs(w - z) <= tol * std::max(1.0, std::abs(z))) return;
    out.push_back(z);
}

inline cplx poly_eval(const std::vector<cplx>& p, cplx z) {
    cplx r = 0;
    for (int k = (int)p.size() - 1; k >= 0; --k) r = r * z + p[k];
    return r;
}

inline std::vector<cplx> poly_deriv(const std::vector<cplx>& p) {
    std::vector<cplx> r;
    for (size_t k = 1; k < p.size(); ++k) r.push_back(p[k] * double(k));
    return r;
}

// roots of sum p[k] z^k, clustered and polished
inline std::vector<cplx> poly_roots(std::vector<cplx> p) {
    double scale = 0;
    for (auto& x : p) scale = std::max(scale, std::abs(x));
    while (!p.empty() && std::abs(p.back()) <= 1e-14 * scale) p.pop_back();
    int n = (int)p.size() - 1;
    if (n < 1) return {};
    if (n == 1) return {-p[0] / p[1]};
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p[i] / p[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    std::vector<cplx> raw(es.eigenvalues().data(), es.eigenvalues().data() + n);
    double rs = 1;
    for (auto& z : raw) rs = std::max(rs, std::abs(z));
    std::vector<char> used(n, 0);
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        cplx sum = 0;
        int m = 0;
        for (int j = i; j < n; ++j)
            if (!used[j] && std::abs(raw[j] - raw[i]) <= 1e-3 * rs) {
                used[j] = 1;
                sum += raw[j];
                ++m;
            }
        cplx z = sum / double(m);
        // a root of multiplicity m is a simple root of the (m-1)-th derivative
        std::vector<cplx> q = p;
        for (int k = 1; k < m; ++k) q = poly_deriv(q);
        std::vector<cplx> dq = poly_deriv(q);
        for (int it = 0; it < 20; ++it) {
            cplx d = poly_eval(dq, z);
            if (d == cplx{}) break;
            cplx step = poly_eval(q, z) / d;
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        out.push_back(z);
    }
    return out;
}

}  // namespace detail

// Solutions of g(z) = z inside `within` and the domain of g.
inline std::vector<cplx> fixed_points(const ConformalMap& g, const Region& within, const FixedPointOptions& o = {}) {
    if (g.is_identity_germ()) throw identity_germ_signal();
    std::vector<cplx> cand;
    auto keep = [&](cplx z) { return within.contains(z) && g.in_domain(z); };
    switch (g.kind) {
        case ConformalMap::Identity: break;
        case ConformalMap::Affine:
            if (g.a != cplx{1}) cand.push_back(g.b / (cplx{1} - g.a));
            break;
        case ConformalMap::Mobius: {
            // c z^2 + (d - a) z - b = 0
            cplx A = g.c, B = g.d - g.a, C = -g.b;
            double scale = std::abs(g.a) + std::abs(g.b) + std::abs(g.c) + std::abs(g.d);
            if (std::abs(A) <= 1e-14 * scale) {
                if (std::abs(B) > 1e-14 * scale) cand.push_back(-C / B);
                break;
            }
            cplx disc = B * B - 4.0 * A * C;
            if (std::abs(disc) < 1e-10 * scale * scale) {
                cand.push_back(-B / (2.0 * A));
            } else {
                cplx s = std::sqrt(disc);
                // numerically stable pair
                cplx q = -0.5 * (B + (std::real(std::conj(B) * s) >= 0 ? s : -s));
                cand.push_back(q / A);
                if (q != cplx{}) cand.push_back(C / q);
            }
            break;
        }
        case ConformalMap::Poly: {
            std::vector<cplx> p = g.coeffs;
            if (p.size() < 2) p.resize(2);
            p[1] -= 1;
            for (auto& z : detail::poly_roots(p)) cand.push_back(z);
            break;
        }
        case ConformalMap::Chain: {
            Box bx = intersect(within.box(), g.domain.box());
            for (auto& m : g.chain)
                if (m.domain.kind != Region::FullPlane) {
                    bx = intersect(bx, m.domain.box());
                    break;
                }
            if (!bx.bounded()) throw usage_error("fixed-point search for a composite map needs a bounded region");
            int N = o.grid;
            for (int i = 0; i < N; ++i)
                for (int j = 0; j < N; ++j) {
                    cplx z(bx.x0 + (bx.x1 - bx.x0) * (i + 0.5) / N, bx.y0 + (bx.y1 - bx.y0) * (j + 0.5) / N);
                    bool ok = false;
                    try {
                        for (int it = 0; it < o.newton_iters && g.in_domain(z); ++it) {
                            Jet1 J = g.jet(z, 1);
                            cplx F = J.c[0] - z, dF = J.c[1] - 1.0;
                            if (dF == cplx{}) break;
                            cplx step = F / dF;
                            z -= step;
                            if (std::abs(step) <= o.newton_tol * std::max(1.0, std::abs(z))) {
                                ok = true;
                                break;
                            }
                        }
                        if (!ok && g.in_domain(z) && std::abs(g.raw_eval(z) - z) < 1e-8) ok = true;
                        if (ok && g.in_domain(z)) {
                            // multiplicity-aware polishing for degenerate roots
                            Jet1 J = g.jet(z, 8);
                            J.c[0] -= z;
                            J.c[1] -= 1.0;
                            int m = 1;
                            while (m < 8 && std::abs(J.c[m]) < 1e-6 * std::max(1.0, J.max_abs())) ++m;
                            for (int it = 0; it < 30; ++it) {
                                Jet1 K = g.jet(z, 1);
                                cplx dF = K.c[1] - 1.0;
                                if (dF == cplx{}) break;
                                cplx step = double(m) * (K.c[0] - z) / dF;
                                z -= step;
                                if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
                            }
                        }
                    } catch (const std::exception&) {
                        ok = false;
                    }
                    if (ok && keep(z) && std::abs(g.raw_eval(z) - z) < 1e-8) detail::merge_root(cand, z, 1e-6);
                }
            break;
        }
    }
    std::vector<cplx> out;
    for (auto& z : cand)
        if (keep(z)) detail::merge_root(out, z, o.merge_tol);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return out;
}

constexpr int ORDER_INFINITY = -1;

struct Automorphism {
    int label = 0;
    cplx z0{};
    int order = 0;  // ORDER_INFINITY for identity germs
    Jet1 h_jet;     // (z - z0)^n / (g(z) - z)
};

struct OrderOptions {
    int n_max = 8;
    int jet_order = 16;
    double rel = 1e-12;
};

// order n of the fixed point and the jet of the H-function
inline Automorphism automorphism_order(const ConformalMap& g, cplx z0, int label = 0, const OrderOptions& o = {}) {
    Automorphism a;
    a.label = label;
    a.z0 = z0;
    if (g.is_identity_germ()) {
        a.order = ORDER_INFINITY;
        return a;
    }
    int K = o.jet_order;
    Jet1 J = g.jet(z0, K);
    if (std::abs(J.c[0] - z0) > 1e-10 * std::max(1.0, std::abs(z0))) throw precondition_error("point is not fixed");
    Jet1 D = J;
    D.c[0] = 0;
    if (K >= 1) D.c[1] -= 1.0;
    double th = o.rel * std::max(1.0, D.max_abs());
    int n = -1;
    for (int k = 1; k <= K; ++k)
        if (std::abs(D.c[k]) > th) {
            n = k;
            break;
        }
    if (n < 0) throw valuation_error("g(z) - z vanishes to the full jet order but the map is not an identity germ");
    if (std::abs(D.c[n]) < 1e3 * th) {
        int next = -1;
        for (int k = n + 1; k <= K; ++k)
            if (std::abs(D.c[k]) > 1e3 * th) {
                next = k;
                break;
            }
        throw tolerance_error("ambiguous fixed-point order: candidates " + std::to_string(n) + " and " +
                              std::to_string(next));
    }
    if (n > o.n_max) throw unsupported_error("fixed-point order " + std::to_string(n) + " exceeds the maximum");
    a.order = n;
    Jet1 num(z0, K);
    num.c[n] = 1;
    a.h_jet = j_div_valuation(num, D, o.rel);
    return a;
}

// Discrete group acting by conformal partial maps; elements are interned integer labels.
class GroupAction {
   public:
    enum Kind { MatrixMobius, FiniteCyclic, FreeGenerators };

    static GroupAction trivial() { return GroupAction(FiniteCyclic, 1, {}, {}); }
    static GroupAction mobius(std::vector<std::string> names, std::vector<ConformalMap> gens) {
        for (auto& g : gens)
            if (!g.mobius_like() || g.domain.kind != Region::FullPlane)
                throw usage_error("matrix group generators must be global Mobius maps");
        return GroupAction(MatrixMobius, 0, std::move(names), std::move(gens));
    }
    static GroupAction cyclic(int m, std::string name, ConformalMap g) {
        if (m < 1) throw usage_error("cyclic order must be positive");
        return GroupAction(FiniteCyclic, m, {std::move(name)}, {std::move(g)});
    }
    static GroupAction free(std::vector<std::string> names, std::vector<ConformalMap> gens) {
        return GroupAction(FreeGenerators, 0, std::move(names), std::move(gens));
    }

    Kind kind() const { return t_->kind; }
    int unit() const { return 0; }
    int num_generators() const { return (int)t_->gens.size(); }
    int generator(int i) const { return from_word({i + 1}); }
    int generator(const std::string& name) const {
        for (size_t i = 0; i < t_->names.size(); ++i)
            if (t_->names[i] == name) return generator((int)i);
        throw usage_error("unknown generator '" + name + "'");
    }

    // label of a*b, acting as map(a) o map(b)
    int mul(int a, int b) const {
        std::lock_guard<std::mutex> lk(t_->mu);
        auto key = std::make_pair(a, b);
        auto it = t_->mul_cache.find(key);
        if (it != t_->mul_cache.end()) return it->second;
        const Entry &ea = t_->entries.at(a), &eb = t_->entries.at(b);
        Entry e;
        e.word = ea.word;
        e.word.insert(e.word.end(), eb.word.begin(), eb.word.end());
        reduce(e.word);
        if (t_->kind == MatrixMobius) e.mat = canonical(mat_mul(ea.mat, eb.mat));
        if (t_->kind == FiniteCyclic) e.k = (ea.k + eb.k) % t_->m;
        int r = intern(std::move(e));
        t_->mul_cache[key] = r;
        return r;
    }
    int inv(int a) const {
        std::vector<int> w;
        {
            std::lock_guard<std::mutex> lk(t_->mu);
            w = t_->entries.at(a).word;
        }
        std::vector<int> r;
        for (auto it = w.rbegin(); it != w.rend(); ++it) r.push_back(-*it);
        return from_word(r);
    }
    // label of a word in generators (+i = generator i-1, -i = its inverse)
    int from_word(const std::vector<int>& w) const {
        int r = unit();
        for (int x : w) {
            if (x == 0 || std::abs(x) > (int)t_->gens.size()) throw usage_error("bad generator index");
            r = mul(r, letter(x));
        }
        return r;
    }
    int size() const {
        std::lock_guard<std::mutex> lk(t_->mu);
        return (int)t_->entries.size();
    }

    std::string name(int a) const {
        std::vector<int> w;
        {
            std::lock_guard<std::mutex> lk(t_->mu);
            w = t_->entries.at(a).word;
        }
        if (w.empty()) return "e";
        std::string s;
        for (size_t i = 0; i < w.size(); ++i) {
            if (i) s += "*";
            s += t_->names[std::abs(w[i]) - 1];
            if (w[i] < 0) s += "^-1";
        }
        return s;
    }
    // "e", "g", "g^-1", "g*h^2"
    int parse_label(const std::string& s) const {
        if (s == "e" || s == "1") return unit();
        int r = unit();
        size_t pos = 0;
        while (pos <= s.size()) {
            size_t st = s.find('*', pos);
            std::string tok = s.substr(pos, st == std::string::npos ? std::string::npos : st - pos);
            int p = 1;
            size_t c = tok.find('^');
            if (c != std::string::npos) {
                try {
                    p = std::stoi(tok.substr(c + 1));
                } catch (const std::logic_error&) {
                    throw parse_error("bad exponent in label '" + s + "'");
                }
                tok = tok.substr(0, c);
            }
            int gl;
            try {
                gl = generator(tok);
            } catch (const usage_error&) {
                throw parse_error("unknown generator in label '" + s + "'");
            }
            int x = p >= 0 ? gl : inv(gl);
            for (int i = 0; i < std::abs(p); ++i) r = mul(r, x);
            if (st == std::string::npos) break;
            pos = st + 1;
        }
        return r;
    }

    const ConformalMap& map(int a) const {
        std::lock_guard<std::mutex> lk(maps_->mu);
        auto it = maps_->cache.find(a);
        if (it != maps_->cache.end()) return *it->second;
        ConformalMap m = base_map(a);
        if (conj_) m = compose_maps(compose_maps(*conj_, m), *conj_inv_);
        auto p = std::make_unique<ConformalMap>(std::move(m));
        const ConformalMap& ref = *p;
        maps_->cache[a] = std::move(p);
        return ref;
    }
    std::shared_ptr<const ConformalMap> map_ptr(int a) const { return std::make_shared<const ConformalMap>(map(a)); }

    bool is_identity_germ(int a) const { return a == unit() || map(a).is_identity_germ(); }

    // same labels acting by h o g o h^-1
    GroupAction conjugated(const ConformalMap& h) const {
        auto hi = h.inverse();
        if (!hi) throw usage_error("conjugating map must be invertible");
        GroupAction r = *this;
        r.maps_ = std::make_shared<MapCache>();
        if (conj_) {
            r.conj_ = compose_maps(h, *conj_);
            r.conj_inv_ = compose_maps(*conj_inv_, *hi);
        } else {
            r.conj_ = h;
            r.conj_inv_ = *hi;
        }
        return r;
    }

   private:
    struct Entry {
        Mat2 mat{1, 0, 0, 1};
        int k = 0;
        std::vector<int> word;
    };
    struct Table {
        Kind kind;
        int m = 0;
        std::vector<std::string> names;
        std::vector<ConformalMap> gens;
        std::vector<Entry> entries;
        std::map<std::pair<int, int>, int> mul_cache;
        std::mutex mu;
    };
    struct MapCache {
        std::map<int, std::unique_ptr<ConformalMap>> cache;
        std::mutex mu;
    };
    std::shared_ptr<Table> t_;
    std::shared_ptr<MapCache> maps_;
    std::optional<ConformalMap> conj_, conj_inv_;

    GroupAction(Kind k, int m, std::vector<std::string> names, std::vector<ConformalMap> gens)
        : t_(std::make_shared<Table>()), maps_(std::make_shared<MapCache>()) {
        if (names.size() != gens.size()) throw usage_error("generator names and maps differ in count");
        t_->kind = k;
        t_->m = m;
        t_->names = std::move(names);
        t_->gens = std::move(gens);
        t_->entries.push_back(Entry{});
    }

    int letter(int x) const {
        Entry e;
        e.word = {x};
        if (t_->kind == MatrixMobius) {
            Mat2 M = t_->gens[std::abs(x) - 1].matrix();
            if (x < 0) M = {M[3], -M[1], -M[2], M[0]};
            e.mat = canonical(M);
        }
        if (t_->kind == FiniteCyclic) e.k = x > 0 ? 1 % t_->m : (t_->m - 1) % t_->m;
        std::lock_guard<std::mutex> lk(t_->mu);
        return intern(std::move(e));
    }

    void reduce(std::vector<int>& w) const {
        if (t_->kind != FreeGenerators && t_->kind != MatrixMobius) {
            // cyclic: keep a normal word g^k
            return;
        }
        std::vector<int> r;
        for (int x : w) {
            if (!r.empty() && r.back() == -x)
                r.pop_back();
            else
                r.push_back(x);
        }
        w = std::move(r);
    }

    static Mat2 canonical(Mat2 M) {
        cplx det = M[0] * M[3] - M[1] * M[2];
        cplx s = std::sqrt(det);
        for (auto& x : M) x /= s;
        double nrm = 0;
        for (auto& x : M) nrm = std::max(nrm, std::abs(x));
        for (auto& x : M)
            if (std::abs(x) > 1e-12 * nrm) {
                double ar = std::arg(x);
                if (!(ar > -M_PI / 2 && ar <= M_PI / 2)) {
                    for (auto& y : M) y = -y;
                }
                break;
            }
        return M;
    }
    static bool same(const Mat2& A, const Mat2& B) {
        for (int i = 0; i < 4; ++i)
            if (std::abs(A[i] - B[i]) > 1e-10 * (1 + std::abs(A[i]))) return false;
        return true;
    }

    // caller holds the table lock
    int intern(Entry e) const {
        auto& E = t_->entries;
        for (size_t i = 0; i < E.size(); ++i) {
            bool eq = false;
            switch (t_->kind) {
                case MatrixMobius: eq = same(E[i].mat, e.mat); break;
                case FiniteCyclic: eq = E[i].k == e.k; break;
                case FreeGenerators: eq = E[i].word == e.word; break;
            }
            if (eq) return (int)i;
        }
        if (t_->kind == FiniteCyclic) {
            e.word.assign(e.k, 1);
        }
        E.push_back(std::move(e));
        return (int)E.size() - 1;
    }

    ConformalMap base_map(int a) const {
        Entry e;
        {
            std::lock_guard<std::mutex> lk(t_->mu);
            e = t_->entries.at(a);
        }
        if (t_->kind == MatrixMobius) {
            const Mat2& M = e.mat;
            if (std::abs(M[1]) <= 1e-14 && std::abs(M[2]) <= 1e-14 && std::abs(M[0] - M[3]) <= 1e-14)
                return ConformalMap::identity();
            if (M[2] == cplx{}) return map_from_matrix(M);
            return ConformalMap::mobius(M[0], M[1], M[2], M[3]);
        }
        ConformalMap m = ConformalMap::identity();
        for (int x : e.word) {
            const ConformalMap& g = t_->gens[std::abs(x) - 1];
            if (x > 0) {
                m = compose_maps(m, g);
            } else {
                auto gi = g.inverse();
                if (!gi) throw unsupported_error("generator has no closed-form inverse");
                m = compose_maps(m, *gi);
            }
        }
        return m;
    }
};

struct AutomorphismSet {
    std::vector<Automorphism> finite;  // isolated automorphisms
    std::vector<int> infinite;         // identity-germ labels
};

inline AutomorphismSet enumerate_automorphisms(const GroupAction& act, const std::set<int>& labels,
                                               const Region& within = Region::full(), const OrderOptions& oo = {},
                                               const FixedPointOptions& fo = {}) {
    AutomorphismSet r;
    r.infinite.push_back(act.unit());
    for (int l : labels) {
        if (l == act.unit()) continue;
        const ConformalMap& g = act.map(l);
        if (g.is_identity_germ()) {
            r.infinite.push_back(l);
            continue;
        }
        std::vector<cplx> pts;
        try {
            pts = fixed_points(g, within, fo);
        } catch (const identity_germ_signal&) {
            r.infinite.push_back(l);
            continue;
        }
        for (cplx z : pts) r.finite.push_back(automorphism_order(g, z, l, oo));
    }
    std::sort(r.infinite.begin(), r.infinite.end());
    return r;
}

}  // namespace ncg
