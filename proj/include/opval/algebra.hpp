#pragma once

// The coefficient algebra B = C^d (finite-dimensional, commutative) and its
// elements, linear self-maps, trace functionals and *-automorphisms. All
// arithmetic is exact over complex rationals.

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "opval/rational.hpp"

namespace opval {

struct algebra {
    int dimension;

    explicit algebra(int d) : dimension(d) {
        if (d < 1) throw std::invalid_argument("algebra dimension must be >= 1");
    }
    friend bool operator==(const algebra&, const algebra&) = default;
};

class alg_elem {
  public:
    alg_elem() = default;
    explicit alg_elem(int dim) : c_(static_cast<size_t>(check_dim(dim))) {}
    explicit alg_elem(std::vector<crational> coords) : c_(std::move(coords)) {
        check_dim(static_cast<int>(c_.size()));
    }

    static alg_elem unit(const algebra& a) {
        alg_elem e(a.dimension);
        for (auto& x : e.c_) x = crational(1);
        return e;
    }
    static alg_elem zero(const algebra& a) { return alg_elem(a.dimension); }
    static alg_elem basis(const algebra& a, int i) {
        alg_elem e(a.dimension);
        e.at(i) = crational(1);
        return e;
    }

    int dim() const { return static_cast<int>(c_.size()); }
    const crational& operator[](int i) const { return c_[static_cast<size_t>(i)]; }
    crational& at(int i) { return c_.at(static_cast<size_t>(i)); }
    const std::vector<crational>& coords() const { return c_; }

    bool is_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const crational& x) { return x.is_zero(); });
    }
    // true iff a scalar multiple of the unit
    bool is_scalar() const {
        return std::all_of(c_.begin(), c_.end(), [&](const crational& x) { return x == c_[0]; });
    }

    alg_elem star() const {
        alg_elem r = *this;
        for (auto& x : r.c_) x = x.conj();
        return r;
    }

    friend alg_elem operator+(const alg_elem& a, const alg_elem& b) {
        check_same(a, b);
        alg_elem r = a;
        for (int i = 0; i < r.dim(); ++i) r.c_[static_cast<size_t>(i)] += b[i];
        return r;
    }
    friend alg_elem operator-(const alg_elem& a, const alg_elem& b) {
        check_same(a, b);
        alg_elem r = a;
        for (int i = 0; i < r.dim(); ++i) r.c_[static_cast<size_t>(i)] -= b[i];
        return r;
    }
    friend alg_elem operator-(const alg_elem& a) {
        alg_elem r = a;
        for (auto& x : r.c_) x = -x;
        return r;
    }
    // coordinatewise (the algebra product of C^d)
    friend alg_elem operator*(const alg_elem& a, const alg_elem& b) {
        check_same(a, b);
        alg_elem r = a;
        for (int i = 0; i < r.dim(); ++i) r.c_[static_cast<size_t>(i)] *= b[i];
        return r;
    }
    friend alg_elem operator*(const crational& s, const alg_elem& a) {
        alg_elem r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    alg_elem& operator+=(const alg_elem& o) { *this = *this + o; return *this; }

    friend bool operator==(const alg_elem&, const alg_elem&) = default;

  private:
    static int check_dim(int d) {
        if (d < 1) throw std::invalid_argument("element dimension must be >= 1");
        return d;
    }
    static void check_same(const alg_elem& a, const alg_elem& b) {
        if (a.dim() != b.dim()) throw std::invalid_argument("algebra dimension mismatch");
    }

    std::vector<crational> c_;
};

// linear self-map of B, (Mb)_i = sum_j M_ij b_j
class linear_map {
  public:
    linear_map() : d_(0) {}
    explicit linear_map(int d) : d_(d), m_(static_cast<size_t>(d) * d) {
        if (d < 1) throw std::invalid_argument("linear map dimension must be >= 1");
    }

    static linear_map identity(int d) {
        linear_map m(d);
        for (int i = 0; i < d; ++i) m.at(i, i) = crational(1);
        return m;
    }

    int dim() const { return d_; }
    crational& at(int i, int j) { return m_.at(static_cast<size_t>(i) * d_ + j); }
    const crational& at(int i, int j) const { return m_.at(static_cast<size_t>(i) * d_ + j); }

    alg_elem apply(const alg_elem& b) const {
        if (b.dim() != d_) throw std::invalid_argument("algebra dimension mismatch");
        alg_elem r(d_);
        for (int i = 0; i < d_; ++i) {
            crational acc;
            for (int j = 0; j < d_; ++j) acc += at(i, j) * b[j];
            r.at(i) = acc;
        }
        return r;
    }

    linear_map compose(const linear_map& o) const {  // this after o
        if (o.d_ != d_) throw std::invalid_argument("algebra dimension mismatch");
        linear_map r(d_);
        for (int i = 0; i < d_; ++i)
            for (int k = 0; k < d_; ++k) {
                crational acc;
                for (int j = 0; j < d_; ++j) acc += at(i, j) * o.at(j, k);
                r.at(i, k) = acc;
            }
        return r;
    }

    friend linear_map operator+(const linear_map& a, const linear_map& b) {
        if (a.d_ != b.d_) throw std::invalid_argument("algebra dimension mismatch");
        linear_map r = a;
        for (size_t i = 0; i < r.m_.size(); ++i) r.m_[i] += b.m_[i];
        return r;
    }
    friend linear_map operator-(const linear_map& a, const linear_map& b) {
        if (a.d_ != b.d_) throw std::invalid_argument("algebra dimension mismatch");
        linear_map r = a;
        for (size_t i = 0; i < r.m_.size(); ++i) r.m_[i] -= b.m_[i];
        return r;
    }
    friend linear_map operator*(const crational& s, const linear_map& a) {
        linear_map r = a;
        for (auto& x : r.m_) x *= s;
        return r;
    }
    friend bool operator==(const linear_map&, const linear_map&) = default;

  private:
    int d_;
    std::vector<crational> m_;
};

// for commutative C^d, complete positivity of a linear map is entrywise
// nonnegativity in the standard basis
inline bool check_positive_map(const linear_map& m) {
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) {
            const crational& e = m.at(i, j);
            if (!e.is_real() || e.re < 0) return false;
        }
    return true;
}

struct trace_functional {
    std::vector<rational> weights;

    explicit trace_functional(std::vector<rational> w) : weights(std::move(w)) {
        if (weights.empty()) throw std::invalid_argument("trace needs at least one weight");
    }

    static trace_functional uniform(const algebra& a) {
        return trace_functional(std::vector<rational>(
            static_cast<size_t>(a.dimension), rational(1, a.dimension)));
    }

    int dim() const { return static_cast<int>(weights.size()); }

    bool is_state() const {
        rational sum = 0;
        for (const auto& w : weights) {
            if (w < 0) return false;
            sum += w;
        }
        return sum == 1;
    }
};

inline crational apply_trace(const trace_functional& tau, const alg_elem& b) {
    if (tau.dim() != b.dim()) throw std::invalid_argument("algebra dimension mismatch");
    crational acc;
    for (int i = 0; i < b.dim(); ++i) acc += crational(tau.weights[static_cast<size_t>(i)]) * b[i];
    return acc;
}

// *-automorphism of C^d; every such map is a coordinate permutation,
// theta(b)_i = b_{perm[i]}
struct algebra_automorphism {
    std::vector<int> perm;  // 0-indexed

    explicit algebra_automorphism(std::vector<int> p) : perm(std::move(p)) {
        std::vector<char> seen(perm.size(), 0);
        for (int v : perm) {
            if (v < 0 || v >= static_cast<int>(perm.size()) || seen[static_cast<size_t>(v)])
                throw std::invalid_argument("permutation is not a bijection");
            seen[static_cast<size_t>(v)] = 1;
        }
    }

    static algebra_automorphism identity(int d) {
        std::vector<int> p(static_cast<size_t>(d));
        std::iota(p.begin(), p.end(), 0);
        return algebra_automorphism(std::move(p));
    }
    // i -> d-1-i, the flip used by the discretized integration kernels
    static algebra_automorphism flip(int d) {
        std::vector<int> p(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) p[static_cast<size_t>(i)] = d - 1 - i;
        return algebra_automorphism(std::move(p));
    }

    int dim() const { return static_cast<int>(perm.size()); }

    alg_elem apply(const alg_elem& b) const {
        if (b.dim() != dim()) throw std::invalid_argument("algebra dimension mismatch");
        alg_elem r(dim());
        for (int i = 0; i < dim(); ++i) r.at(i) = b[perm[static_cast<size_t>(i)]];
        return r;
    }

    algebra_automorphism inverse() const {
        std::vector<int> p(perm.size());
        for (int i = 0; i < dim(); ++i) p[static_cast<size_t>(perm[static_cast<size_t>(i)])] = i;
        return algebra_automorphism(std::move(p));
    }

    // theta o M o theta
    linear_map conjugate(const linear_map& m) const {
        if (m.dim() != dim()) throw std::invalid_argument("algebra dimension mismatch");
        auto inv = inverse();
        linear_map r(dim());
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j)
                r.at(i, j) = m.at(perm[static_cast<size_t>(i)], inv.perm[static_cast<size_t>(j)]);
        return r;
    }
};

}  // namespace opval
