#pragma once

// Truncated B-valued power series, the coupled fixed-point systems for the
// alternating moment generating series, and truncated multilinear function
// series with multivariate composition.
//
// Degree convention: one unit of the formal variable z per a-a* pair, so the
// degree-n coefficient of F is the alternating moment of order n.

#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "opval/algebra.hpp"
#include "opval/circular.hpp"
#include "opval/map_family.hpp"
#include "opval/rdiag.hpp"
#include "opval/tensor.hpp"

namespace opval {

class bseries {
  public:
    bseries(algebra alg, int trunc)
        : alg_(alg), c_(static_cast<size_t>(trunc) + 1, alg_elem(alg.dimension)) {
        if (trunc < 0) throw std::invalid_argument("negative truncation");
    }

    static bseries one(algebra alg, int trunc) {
        bseries s(alg, trunc);
        s.c_[0] = alg_elem::unit(alg);
        return s;
    }
    static bseries constant(const alg_elem& c, int trunc) {
        bseries s(algebra(c.dim()), trunc);
        s.c_[0] = c;
        return s;
    }

    const algebra& alg() const { return alg_; }
    int trunc() const { return static_cast<int>(c_.size()) - 1; }
    const alg_elem& coeff(int n) const { return c_.at(static_cast<size_t>(n)); }
    alg_elem& coeff(int n) { return c_.at(static_cast<size_t>(n)); }

    friend bseries operator+(const bseries& a, const bseries& b) {
        check(a, b);
        bseries r = a;
        for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] += b.c_[i];
        return r;
    }
    friend bseries operator-(const bseries& a, const bseries& b) {
        check(a, b);
        bseries r = a;
        for (size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = r.c_[i] - b.c_[i];
        return r;
    }
    // truncated Cauchy product
    friend bseries operator*(const bseries& a, const bseries& b) {
        check(a, b);
        bseries r(a.alg_, a.trunc());
        for (int n = 0; n <= a.trunc(); ++n)
            for (int k = 0; k <= n; ++k) r.c_[static_cast<size_t>(n)] +=
                a.coeff(k) * b.coeff(n - k);
        return r;
    }
    friend bseries operator*(const crational& s, const bseries& a) {
        bseries r = a;
        for (auto& c : r.c_) c = s * c;
        return r;
    }
    friend bool operator==(const bseries&, const bseries&) = default;

  private:
    static void check(const bseries& a, const bseries& b) {
        if (!(a.alg_ == b.alg_) || a.c_.size() != b.c_.size())
            throw std::invalid_argument("series mismatch");
    }

    algebra alg_;
    std::vector<alg_elem> c_;
};

struct fg_pair {
    bseries F;
    bseries G;
};

// F(b1,b2) = 1 + eta1(b1 G(b2,b1)) b2 F(b1,b2),
// G(b1,b2) = 1 + eta2(b1 F(b2,b1)) b2 G(b1,b2),
// solved degree by degree together with the argument-swapped companions
inline fg_pair solve_fg(const circular_model& m, const alg_elem& b1, const alg_elem& b2, int N) {
    if (b1.dim() != m.alg.dimension || b2.dim() != m.alg.dimension)
        throw std::invalid_argument("dimension mismatch");
    bseries F12 = bseries::one(m.alg, N), F21 = F12, G12 = F12, G21 = F12;
    for (int n = 1; n <= N; ++n) {
        alg_elem f12(m.alg.dimension), f21(m.alg.dimension), g12(m.alg.dimension),
            g21(m.alg.dimension);
        for (int i = 0; i + 1 <= n; ++i) {
            const int j = n - 1 - i;
            f12 += m.eta1.apply(b1 * G21.coeff(i)) * b2 * F12.coeff(j);
            f21 += m.eta1.apply(b2 * G12.coeff(i)) * b1 * F21.coeff(j);
            g12 += m.eta2.apply(b1 * F21.coeff(i)) * b2 * G12.coeff(j);
            g21 += m.eta2.apply(b2 * F12.coeff(i)) * b1 * G21.coeff(j);
        }
        F12.coeff(n) = f12;
        F21.coeff(n) = f21;
        G12.coeff(n) = g12;
        G21.coeff(n) = g21;
    }
    return {F12, G12};
}

namespace detail {

// compositions of total into exactly parts nonnegative summands
inline void for_each_composition(int total, int parts,
                                 const std::function<void(std::span<const int>)>& fn) {
    std::vector<int> ks(static_cast<size_t>(parts), 0);
    auto rec = [&](auto&& self, int pos, int rest) -> void {
        if (pos == parts - 1) {
            ks[static_cast<size_t>(pos)] = rest;
            fn(ks);
            return;
        }
        for (int v = 0; v <= rest; ++v) {
            ks[static_cast<size_t>(pos)] = v;
            self(self, pos + 1, rest - v);
        }
    };
    if (parts == 0) {
        if (total == 0) fn(ks);
        return;
    }
    rec(rec, 0, total);
}

}  // namespace detail

// general R-diagonal version: F = 1 + sum_l beta_l^{(1)}(b1 G~, b2 F, ...,
// b1 G~) b2 F truncated at z^N, the 2l-th order cumulant contributing degree l
inline fg_pair solve_alternating_series(const rdiag_model& m, const alg_elem& b1,
                                        const alg_elem& b2, int N) {
    if (b1.dim() != m.alg.dimension || b2.dim() != m.alg.dimension)
        throw std::invalid_argument("dimension mismatch");
    bseries F12 = bseries::one(m.alg, N), F21 = F12, G12 = F12, G21 = F12;
    for (int n = 1; n <= N; ++n) {
        alg_elem acc[4] = {alg_elem(m.alg.dimension), alg_elem(m.alg.dimension),
                           alg_elem(m.alg.dimension), alg_elem(m.alg.dimension)};
        for (int l = 1; l <= m.stored_k() && l <= n; ++l) {
            const auto& beta1 = m.betas[static_cast<size_t>(l - 1)].first;
            const auto& beta2 = m.betas[static_cast<size_t>(l - 1)].second;
            const int nargs = 2 * l - 1;
            detail::for_each_composition(n - l, nargs + 1, [&](std::span<const int> ks) {
                // variant 0: F(b1,b2); arguments alternate b1*G21, b2*F12
                // variant 1: F(b2,b1); arguments alternate b2*G12, b1*F21
                // variant 2: G(b1,b2); arguments alternate b1*F21, b2*G12
                // variant 3: G(b2,b1); arguments alternate b2*F12, b1*G21
                const bseries* inner[4][2] = {
                    {&G21, &F12}, {&G12, &F21}, {&F21, &G12}, {&F12, &G21}};
                const alg_elem* left[4][2] = {{&b1, &b2}, {&b2, &b1}, {&b1, &b2}, {&b2, &b1}};
                for (int v = 0; v < 4; ++v) {
                    std::vector<alg_elem> args;
                    args.reserve(static_cast<size_t>(nargs));
                    for (int p = 0; p < nargs; ++p)
                        args.push_back(*left[v][p % 2] *
                                       inner[v][p % 2]->coeff(ks[static_cast<size_t>(p)]));
                    const ctensor& beta = (v <= 1) ? beta1 : beta2;
                    const bseries* trail = (v == 0) ? &F12 : (v == 1) ? &F21
                                                   : (v == 2)         ? &G12
                                                                      : &G21;
                    const alg_elem* tb = left[v][1];
                    acc[v] += beta.apply(args) * (*tb) *
                              trail->coeff(ks[static_cast<size_t>(nargs)]);
                }
            });
        }
        F12.coeff(n) = acc[0];
        F21.coeff(n) = acc[1];
        G12.coeff(n) = acc[2];
        G21.coeff(n) = acc[3];
    }
    return {F12, G12};
}

// multilinear function series: constant term plus one n-multilinear map per
// degree n, stored as dense tensors
class multiseries {
  public:
    multiseries(algebra alg, int trunc)
        : alg_(alg), c0_(alg.dimension), terms_(static_cast<size_t>(trunc)) {
        if (trunc < 0) throw std::invalid_argument("negative truncation");
        for (int n = 1; n <= trunc; ++n)
            terms_[static_cast<size_t>(n - 1)] = ctensor(alg.dimension, n + 1);
    }

    static multiseries constant(const alg_elem& c, int trunc) {
        multiseries s(algebra(c.dim()), trunc);
        s.c0_ = c;
        return s;
    }
    // identity of composition: zero constant term, degree-1 term the identity map
    static multiseries identity(algebra alg, int trunc) {
        multiseries s(alg, trunc);
        if (trunc >= 1) s.set_term(1, ctensor::from_linear_map(linear_map::identity(alg.dimension)));
        return s;
    }

    const algebra& alg() const { return alg_; }
    int trunc() const { return static_cast<int>(terms_.size()); }
    const alg_elem& constant_term() const { return c0_; }
    alg_elem& constant_term() { return c0_; }
    const ctensor& term(int n) const { return terms_.at(static_cast<size_t>(n - 1)); }
    void set_term(int n, ctensor t) {
        if (t.dim() != alg_.dimension || t.order() != n + 1)
            throw std::invalid_argument("term shape mismatch");
        terms_.at(static_cast<size_t>(n - 1)) = std::move(t);
    }

    friend multiseries operator+(const multiseries& a, const multiseries& b) {
        check(a, b);
        multiseries r = a;
        r.c0_ += b.c0_;
        for (size_t i = 0; i < r.terms_.size(); ++i) r.terms_[i] = r.terms_[i] + b.terms_[i];
        return r;
    }
    // ring product: (X Psi)_n(b_1..b_n) = sum_k X_k(b_1..b_k) Psi_{n-k}(b_{k+1}..b_n)
    friend multiseries operator*(const multiseries& a, const multiseries& b) {
        check(a, b);
        const int d = a.alg_.dimension;
        multiseries r(a.alg_, a.trunc());
        r.c0_ = a.c0_ * b.c0_;
        for (int n = 1; n <= a.trunc(); ++n) {
            ctensor t(d, n + 1);
            std::vector<int> idx(static_cast<size_t>(n) + 1, 0);
            const size_t cells = t.size();
            for (size_t f = 0; f < cells; ++f) {
                crational acc;
                for (int k = 0; k <= n; ++k) {
                    // value at coordinate idx[0] of X_k(sub) * Psi_{n-k}(rest)
                    crational xa = a.factor_value(k, idx, 1);
                    if (xa.is_zero()) continue;
                    crational xb = b.factor_value(n - k, idx, static_cast<size_t>(k) + 1);
                    acc += xa * xb;
                }
                t.flat_at(f) = acc;
                for (int m = n; m >= 0; --m) {
                    if (++idx[static_cast<size_t>(m)] < d) break;
                    idx[static_cast<size_t>(m)] = 0;
                }
            }
            r.terms_[static_cast<size_t>(n - 1)] = std::move(t);
        }
        return r;
    }
    friend bool operator==(const multiseries&, const multiseries&) = default;

    // chi_n evaluated on general algebra elements
    alg_elem apply_term(int n, std::span<const alg_elem> args) const {
        if (n == 0) return c0_;
        return term(n).apply(args);
    }

  private:
    static void check(const multiseries& a, const multiseries& b) {
        if (!(a.alg_ == b.alg_) || a.terms_.size() != b.terms_.size())
            throw std::invalid_argument("multiseries mismatch");
    }

    // coordinate idx[0] of term k applied to basis vectors at idx[off..off+k)
    crational factor_value(int k, const std::vector<int>& idx, size_t off) const {
        if (k == 0) return c0_[idx[0]];
        std::vector<int> ti{idx[0]};
        for (int m = 0; m < k; ++m) ti.push_back(idx[off + static_cast<size_t>(m)]);
        return term(k).at(std::span<const int>(ti));
    }

    algebra alg_;
    alg_elem c0_;
    std::vector<ctensor> terms_;
};

// multivariate composition: the j-th argument slot of chi_p is fed by the
// series psis[f(p,j)] (f 0-based into psis); every psi must have zero
// constant term
inline multiseries multi_compose(const multiseries& X, const std::function<int(int, int)>& f,
                                 std::span<const multiseries* const> psis) {
    for (const auto* p : psis) {
        if (!(p->alg() == X.alg()) || p->trunc() != X.trunc())
            throw std::invalid_argument("multiseries mismatch");
        if (!p->constant_term().is_zero())
            throw std::invalid_argument("composition requires zero constant terms");
    }
    const int d = X.alg().dimension;
    const int N = X.trunc();
    multiseries r(X.alg(), N);
    r.constant_term() = X.constant_term();
    for (int n = 1; n <= N; ++n) {
        ctensor t(d, n + 1);
        std::vector<int> idx(static_cast<size_t>(n) + 1, 0);
        const size_t cells = t.size();
        for (size_t f0 = 0; f0 < cells; ++f0) {
            // basis inputs e_{idx[1..n]}, output coordinate idx[0]
            crational acc;
            for (int p = 1; p <= n; ++p) {
                detail::for_each_composition(n - p, p, [&](std::span<const int> extra) {
                    // block j has length extra[j] + 1 >= 1
                    std::vector<alg_elem> inner;
                    inner.reserve(static_cast<size_t>(p));
                    size_t off = 1;
                    for (int j = 0; j < p; ++j) {
                        const int kj = extra[static_cast<size_t>(j)] + 1;
                        std::vector<alg_elem> block;
                        block.reserve(static_cast<size_t>(kj));
                        for (int m = 0; m < kj; ++m)
                            block.push_back(alg_elem::basis(X.alg(), idx[off + static_cast<size_t>(m)]));
                        off += static_cast<size_t>(kj);
                        const int which = f(p, j + 1);
                        inner.push_back(psis[static_cast<size_t>(which)]->apply_term(kj, block));
                    }
                    acc += X.apply_term(p, inner)[idx[0]];
                });
            }
            t.flat_at(f0) = acc;
            for (int m = n; m >= 0; --m) {
                if (++idx[static_cast<size_t>(m)] < d) break;
                idx[static_cast<size_t>(m)] = 0;
            }
        }
        r.set_term(n, std::move(t));
    }
    return r;
}

// moment multilinear series M of a two-label moment family along the
// alternating pattern: term 2n is the full 2n-linear alternating moment map
// (the order-2n moment map times the trailing coefficient)
inline multiseries moment_multiseries(const map_family& moments, int first_label, int N) {
    if (moments.kind() != family_kind::moments)
        throw std::invalid_argument("expected a moment family");
    const int d = moments.alg().dimension;
    multiseries s(moments.alg(), N);
    s.constant_term() = alg_elem::unit(moments.alg());
    for (int n2 = 2; n2 <= N; n2 += 2) {
        const ctensor psi = moments.map_tensor(alternating_word(first_label, n2));
        ctensor t(d, n2 + 1);
        std::vector<int> idx(static_cast<size_t>(n2) + 1, 0);
        for (size_t f = 0; f < t.size(); ++f) {
            // T[t; k_1..k_{2n}] = psi[t; k_1..k_{2n-1}] * delta(t, k_{2n})
            if (idx[0] == idx[static_cast<size_t>(n2)]) {
                std::vector<int> pi(idx.begin(), idx.end() - 1);
                t.flat_at(f) = psi.at(std::span<const int>(pi));
            }
            for (int m = n2; m >= 0; --m) {
                if (++idx[static_cast<size_t>(m)] < d) break;
                idx[static_cast<size_t>(m)] = 0;
            }
        }
        s.set_term(n2, std::move(t));
    }
    return s;
}

// cumulant multilinear series A: term 2l-1 is the order-2l alternating
// cumulant map; even terms vanish
inline multiseries cumulant_multiseries(const rdiag_model& m, int first_label, int N) {
    multiseries s(m.alg, N);
    for (int l = 1; 2 * l - 1 <= N && l <= m.stored_k(); ++l) {
        const ctensor& beta = first_label == 0 ? m.betas[static_cast<size_t>(l - 1)].first
                                               : m.betas[static_cast<size_t>(l - 1)].second;
        s.set_term(2 * l - 1, beta);
    }
    return s;
}

}  // namespace opval
