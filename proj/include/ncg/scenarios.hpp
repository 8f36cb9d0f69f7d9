#pragma once

#include <random>

#include "index.hpp"

namespace ncg {

using Rng = std::mt19937_64;

inline double uniform(Rng& r, double a, double b) { return std::uniform_real_distribution<double>(a, b)(r); }
inline cplx uniform_c(Rng& r, double s) { return {uniform(r, -s, s), uniform(r, -s, s)}; }

// bump(center) times a random polynomial in z, zbar of total degree <= deg
inline Field random_bumped_poly(Rng& r, cplx center, double rp, double rs, int deg = 2, double scale = 1) {
    Field p;
    for (int j = 0; j <= deg; ++j)
        for (int k = 0; j + k <= deg; ++k) {
            cplx c = uniform_c(r, scale);
            p += Field(c) * Field::z().pow(j) * Field::zbar().pow(k);
        }
    return Field::bump(center, rp, rs) * p;
}

// sum of c_k z^k, k <= deg, times a bump
inline Field random_holo_poly(Rng& r, std::vector<cplx>& coeffs, double rp, double rs, int deg = 2) {
    coeffs.clear();
    Field p;
    for (int k = 0; k <= deg; ++k) {
        coeffs.push_back(uniform_c(r, 1));
        p += Field(coeffs.back()) * Field::z().pow(k);
    }
    return Field::bump(0, rp, rs) * p;
}

// Mobius group in which every element fixes 0: a dilation and a parabolic
inline GroupAction trace_group() {
    return GroupAction::mobius({"a", "b"}, {ConformalMap::affine(2, 0), ConformalMap::mobius(1, 0, 0.05, 1)});
}

inline std::vector<int> trace_labels(const GroupAction& G) {
    std::vector<int> r;
    for (const char* s : {"a", "b", "a^-1", "b^-1", "a*b", "b*a^-1"}) r.push_back(G.parse_label(s));
    return r;
}

// coefficients with plateau at the common fixed point 0
inline Element random_trace_element(Rng& r, const GroupAction& G, const std::vector<int>& labels, int terms = 3) {
    Element e(1);
    for (int t = 0; t < terms; ++t) {
        int l = labels[std::uniform_int_distribution<int>(0, (int)labels.size() - 1)(r)];
        e.add(Key{unit_word(), l}, FMat::scalar(1, random_bumped_poly(r, 0, 0.5, 1.0)));
    }
    return e;
}

// group with identity germs beyond the unit and a non-affine generator
inline GroupAction cocycle_group() { return GroupAction::mobius({"p"}, {ConformalMap::mobius(1, 0, 0.2, 1)}); }

inline Element random_cocycle_element(Rng& r, const GroupAction& G, int terms = 2) {
    std::vector<int> labels{G.unit(), G.parse_label("p"), G.parse_label("p^-1")};
    Element e(1);
    for (int t = 0; t < terms; ++t) {
        int l = labels[std::uniform_int_distribution<int>(0, 2)(r)];
        cplx c = uniform_c(r, 0.3);
        e.add(Key{unit_word(), l}, FMat::scalar(1, random_bumped_poly(r, c, 0.5, 1.0)));
    }
    return e;
}

// element with forms of every bidegree
inline Element random_form_element(Rng& r, const GroupAction& G, const std::vector<int>& labels, int terms = 2) {
    Element e(1);
    for (int t = 0; t < terms; ++t) {
        int l = labels[std::uniform_int_distribution<int>(0, (int)labels.size() - 1)(r)];
        Form f;
        for (int i = 0; i < 4; ++i)
            if (uniform(r, 0, 1) < 0.7) f.f[i] = random_bumped_poly(r, uniform_c(r, 0.3), 0.5, 1.0, 1);
        FMat m(1);
        m(0, 0) = f;
        e.add(Key{unit_word(), l}, m);
    }
    return e;
}

// stereographic projector onto (z, c) with c a cutoff; equals diag(1,0) outside the support
inline Element bott_projector(double rp = 1, double rs = 2) {
    Field c = Field::bump(0, rp, rs), z = Field::z(), zb = Field::zbar();
    Field R = Field::recip(z * zb + c * c);
    FMat inf(2), k(2);
    inf(0, 0) = Form::zero_form(1.0);
    k(0, 0) = Form::zero_form(Field(-1.0) * c * c * R);
    k(0, 1) = Form::zero_form(c * z * R);
    k(1, 0) = Form::zero_form(c * zb * R);
    k(1, 1) = Form::zero_form(c * c * R);
    return Element::generator(inf, 0) + Element::generator(k, 0);
}

// 1 + t M x with M = [[1, 1], [-1, -1]] square-zero
inline RelInvertible nilpotent_invertible(const Element& x, double t) {
    if (x.n != 1) throw usage_error("expected a scalar crossed element");
    Element a(2);
    for (auto& [k, m] : x.terms) {
        Form f = Field(t) * m(0, 0);
        FMat b(2);
        b(0, 0) = f;
        b(0, 1) = f;
        b(1, 0) = -f;
        b(1, 1) = -f;
        a.add(k, b);
    }
    return {a, -a};
}

inline Element block_diag(const Element& x, const Element& y) {
    int n = x.n + y.n;
    Element r(n);
    auto place = [&](const Element& s, int off) {
        for (auto& [k, m] : s.terms) {
            FMat b(n);
            for (int i = 0; i < s.n; ++i)
                for (int j = 0; j < s.n; ++j) b(i + off, j + off) = m(i, j);
            r.add(k, b);
        }
    };
    place(x, 0);
    place(y, x.n);
    return r;
}

inline RelInvertible block_diag(const RelInvertible& u, const RelInvertible& v) {
    return {block_diag(u.a, v.a), block_diag(u.b, v.b)};
}

}  // namespace ncg
