#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <vector>

#include "conformal.hpp"

namespace ncg {

struct QuadratureSpec {
    double tol = 1e-6;
    int max_depth = 12;
    int threads = 1;
};

struct QuadResult {
    cplx value{};
    double est_error = 0;
    bool converged = true;
    long evals = 0;
};

namespace detail {

struct GaussLegendre8 {
    std::array<double, 8> x, w;
    GaussLegendre8() {
        const int n = 8;
        for (int i = 0; i < n; ++i) {
            double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (t * p1 - p0) / (t * t - 1);
                double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-16) break;
            }
            double p0 = 1, p1 = t;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1);
            x[i] = t;
            w[i] = 2 / ((1 - t * t) * dp * dp);
        }
    }
};

inline const GaussLegendre8& gl8() {
    static const GaussLegendre8 g;
    return g;
}

struct Cell {
    double x0, x1, y0, y1;
};

template <class F>
cplx gl_cell(F& f, const Cell& c, long& evals) {
    const auto& g = gl8();
    double hx = (c.x1 - c.x0) / 2, hy = (c.y1 - c.y0) / 2, mx = (c.x1 + c.x0) / 2, my = (c.y1 + c.y0) / 2;
    cplx s = 0;
    for (int i = 0; i < 8; ++i) {
        cplx row = 0;
        for (int j = 0; j < 8; ++j) row += g.w[j] * f(cplx(mx + hx * g.x[i], my + hy * g.x[j]));
        s += g.w[i] * row;
    }
    evals += 64;
    return s * (hx * hy);
}

template <class F>
void refine(F& f, const Cell& c, cplx whole, int depth, double tol_cell, const QuadratureSpec& spec, QuadResult& out) {
    double mx = (c.x0 + c.x1) / 2, my = (c.y0 + c.y1) / 2;
    std::array<Cell, 4> ch = {Cell{c.x0, mx, c.y0, my}, Cell{mx, c.x1, c.y0, my}, Cell{c.x0, mx, my, c.y1},
                              Cell{mx, c.x1, my, c.y1}};
    std::array<cplx, 4> v;
    cplx sum = 0;
    for (int k = 0; k < 4; ++k) {
        v[k] = gl_cell(f, ch[k], out.evals);
        sum += v[k];
    }
    double err = std::abs(sum - whole);
    if (err <= tol_cell || depth >= spec.max_depth) {
        if (err > tol_cell) out.converged = false;
        out.value += sum;
        out.est_error += err;
        return;
    }
    for (int k = 0; k < 4; ++k) refine(f, ch[k], v[k], depth + 1, tol_cell / 4, spec, out);
}

}  // namespace detail

// Adaptive quadtree with tensor Gauss-Legendre cells over a bounded box.
// make() returns an integrand object; one is created per worker.
template <class Make>
QuadResult integrate_box(Make make, const Box& box, const QuadratureSpec& spec) {
    if (!(spec.tol > 0)) throw usage_error("quadrature tolerance must be positive");
    QuadResult total;
    if (box.empty) return total;
    if (!box.bounded()) throw precondition_error("integrand support is not bounded");
    const int N = 4;
    std::vector<detail::Cell> cells;
    double dx = (box.x1 - box.x0) / N, dy = (box.y1 - box.y0) / N;
    if (dx <= 0 || dy <= 0) return total;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
            cells.push_back({box.x0 + i * dx, box.x0 + (i + 1) * dx, box.y0 + j * dy, box.y0 + (j + 1) * dy});
    double tol_cell = spec.tol / cells.size();
    std::vector<QuadResult> parts(cells.size());
    auto work = [&](size_t lo, size_t hi) {
        auto f = make();
        for (size_t k = lo; k < hi; ++k) {
            QuadResult r;
            cplx whole = detail::gl_cell(f, cells[k], r.evals);
            detail::refine(f, cells[k], whole, 1, tol_cell, spec, r);
            parts[k] = r;
        }
    };
    int T = std::max(1, std::min<int>(spec.threads, (int)cells.size()));
    if (T == 1) {
        work(0, cells.size());
    } else {
        std::vector<std::future<void>> fs;
        size_t per = (cells.size() + T - 1) / T;
        for (int t = 0; t < T; ++t) {
            size_t lo = t * per, hi = std::min(cells.size(), lo + per);
            if (lo < hi) fs.push_back(std::async(std::launch::async, work, lo, hi));
        }
        for (auto& f : fs) f.get();
    }
    // fixed-order pairwise reduction
    std::vector<cplx> vals;
    for (auto& p : parts) {
        vals.push_back(p.value);
        total.est_error += p.est_error;
        total.converged = total.converged && p.converged;
        total.evals += p.evals;
    }
    while (vals.size() > 1) {
        std::vector<cplx> nx;
        for (size_t i = 0; i + 1 < vals.size(); i += 2) nx.push_back(vals[i] + vals[i + 1]);
        if (vals.size() % 2) nx.push_back(vals.back());
        vals = std::move(nx);
    }
    total.value = vals.empty() ? cplx{} : vals[0];
    return total;
}

// single shared callable (must be thread-safe when threads > 1)
template <class F>
QuadResult integrate_fn(const F& f, const Box& box, const QuadratureSpec& spec) {
    return integrate_box([&] { return f; }, box, spec);
}

}  // namespace ncg
