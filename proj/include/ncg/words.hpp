#pragma once

#include <map>
#include <tuple>
#include <vector>

#include "groupoid.hpp"

namespace ncg {

// Basis element a0 da1 da2 ... of even/odd noncommutative forms over the group ring.
// Letters are group labels; a0 may be UNIT_LETTER for the adjoined unit.
// Order-k elements (2k differentials) span the k-th power of the curvature ideal;
// products are Fedosov products, so the algebra models the completed tensor algebra.
using Word = std::vector<int>;
constexpr int UNIT_LETTER = -1;

inline Word unit_word() { return {UNIT_LETTER}; }
inline int word_order(const Word& w) { return ((int)w.size() - 1) / 2; }

using WordPoly = std::map<Word, double>;

// x db y with x, y words and b a label
struct OneWord {
    Word x;
    int b = 0;
    Word y;
    bool operator<(const OneWord& o) const { return std::tie(x, b, y) < std::tie(o.x, o.b, o.y); }
    bool operator==(const OneWord& o) const { return x == o.x && b == o.b && y == o.y; }
};
using OnePoly = std::map<OneWord, double>;

// representative x db after moving right factors to the front
using NaturalKey = std::pair<Word, int>;

inline void accumulate(WordPoly& p, const Word& w, double c) {
    if (c == 0) return;
    auto [it, fresh] = p.emplace(w, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}
inline void accumulate(OnePoly& p, const OneWord& w, double c) {
    if (c == 0) return;
    auto [it, fresh] = p.emplace(w, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) p.erase(it);
    }
}

class WordAlgebra {
   public:
    WordAlgebra(const GroupAction& act, int L) : act_(&act), L_(L) {
        if (L < 0) throw usage_error("negative truncation");
    }
    int truncation() const { return L_; }
    const GroupAction& action() const { return *act_; }

    // product in the group ring, U_a U_b
    int bmul(int a, int b) const {
        if (a == UNIT_LETTER) return b;
        if (b == UNIT_LETTER) return a;
        return act_->mul(b, a);
    }

    // w . b for a form w and a ring element b (Leibniz moves b through the differentials)
    WordPoly rmul(const Word& w, int b) const {
        WordPoly r;
        if (w.size() == 1) {
            accumulate(r, {bmul(w[0], b)}, 1);
            return r;
        }
        Word prefix(w.begin(), w.end() - 1);
        int last = w.back();
        Word t = prefix;
        t.push_back(bmul(last, b));
        accumulate(r, t, 1);
        for (auto& [u, c] : rmul(prefix, last)) {
            Word v = u;
            v.push_back(b);
            accumulate(r, v, -c);
        }
        return r;
    }

    // ordinary product of noncommutative forms
    WordPoly omega_mul(const Word& w, const Word& v) const {
        WordPoly r;
        if (v[0] == UNIT_LETTER) {
            Word t = w;
            t.insert(t.end(), v.begin() + 1, v.end());
            accumulate(r, t, 1);
            return r;
        }
        for (auto& [u, c] : rmul(w, v[0])) {
            Word t = u;
            t.insert(t.end(), v.begin() + 1, v.end());
            accumulate(r, t, c);
        }
        return r;
    }

    // Fedosov product w o v = wv - dw dv, truncated at order L
    WordPoly fedosov(const Word& w, const Word& v) const {
        WordPoly r;
        for (auto& [u, c] : omega_mul(w, v))
            if (word_order(u) <= L_) accumulate(r, u, c);
        if (w[0] != UNIT_LETTER && v[0] != UNIT_LETTER) {
            Word t{UNIT_LETTER};
            t.insert(t.end(), w.begin(), w.end());
            t.insert(t.end(), v.begin(), v.end());
            if (word_order(t) <= L_) accumulate(r, t, -1);
        }
        return r;
    }

    WordPoly mul(const WordPoly& p, const WordPoly& q) const {
        WordPoly r;
        for (auto& [w, a] : p)
            for (auto& [v, b] : q)
                for (auto& [u, c] : fedosov(w, v)) accumulate(r, u, a * b * c);
        return r;
    }

    // universal derivation on a basis word
    OnePoly d(const Word& w) const {
        OnePoly r;
        int k = word_order(w);
        if (w[0] != UNIT_LETTER) {
            Word suffix{UNIT_LETTER};
            suffix.insert(suffix.end(), w.begin() + 1, w.end());
            accumulate(r, OneWord{unit_word(), w[0], suffix}, 1);
        }
        for (int i = 1; i <= k; ++i) {
            int a = w[2 * i - 1], b = w[2 * i];
            Word prefix(w.begin(), w.begin() + 2 * i - 1);
            Word suffix{UNIT_LETTER};
            suffix.insert(suffix.end(), w.begin() + 2 * i + 1, w.end());
            // d(ab) - da b - a db for the curvature factor
            std::vector<std::pair<OneWord, double>> terms = {
                {OneWord{unit_word(), bmul(a, b), unit_word()}, 1.0},
                {OneWord{unit_word(), a, Word{b}}, -1.0},
                {OneWord{Word{a}, b, unit_word()}, -1.0}};
            for (auto& [t, s] : terms) {
                WordPoly left = fedosov(prefix, t.x), right = fedosov(t.y, suffix);
                for (auto& [lx, lc] : left)
                    for (auto& [ry, rc] : right)
                        if (word_order(lx) + word_order(ry) <= L_)
                            accumulate(r, OneWord{lx, t.b, ry}, s * lc * rc);
            }
        }
        return r;
    }

    OnePoly left_mul(const Word& w, const OneWord& t) const {
        OnePoly r;
        for (auto& [u, c] : fedosov(w, t.x))
            if (word_order(u) + word_order(t.y) <= L_) accumulate(r, OneWord{u, t.b, t.y}, c);
        return r;
    }
    OnePoly right_mul(const OneWord& t, const Word& w) const {
        OnePoly r;
        for (auto& [u, c] : fedosov(t.y, w))
            if (word_order(t.x) + word_order(u) <= L_) accumulate(r, OneWord{t.x, t.b, u}, c);
        return r;
    }

    // x db y ~ (y x) db modulo graded commutators
    std::map<NaturalKey, double> natural(const OneWord& t) const {
        std::map<NaturalKey, double> r;
        for (auto& [u, c] : fedosov(t.y, t.x)) r[{u, t.b}] += c;
        return r;
    }

    // multiplication map onto the group ring; nullopt for positive order
    std::optional<int> mu(const Word& w) const {
        if (w.size() != 1) return std::nullopt;
        return w[0] == UNIT_LETTER ? act_->unit() : w[0];
    }

   private:
    const GroupAction* act_;
    int L_;
};

}  // namespace ncg
