#pragma once

// Dense tensor of exact complex rationals encoding a multilinear map
// B^(order-1) -> B over B = C^d. Index layout is row-major with the output
// coordinate first: T[t; k_1..k_{order-1}].

#include <span>
#include <stdexcept>
#include <vector>

#include "opval/algebra.hpp"
#include "opval/rational.hpp"

namespace opval {

class ctensor {
  public:
    ctensor() : dim_(0), order_(0) {}
    ctensor(int dim, int order)
        : dim_(dim), order_(order), v_(pow_size(dim, order)) {
        if (dim < 1 || order < 1) throw std::invalid_argument("bad tensor shape");
    }

    static ctensor from_linear_map(const linear_map& m) {
        ctensor t(m.dim(), 2);
        for (int i = 0; i < m.dim(); ++i)
            for (int j = 0; j < m.dim(); ++j) t.at({i, j}) = m.at(i, j);
        return t;
    }

    linear_map to_linear_map() const {
        if (order_ != 2) throw std::invalid_argument("tensor order is not 2");
        linear_map m(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) m.at(i, j) = at({i, j});
        return m;
    }

    // order-1 tensors are plain algebra elements
    alg_elem as_element() const {
        if (order_ != 1) throw std::invalid_argument("tensor order is not 1");
        alg_elem e(dim_);
        for (int i = 0; i < dim_; ++i) e.at(i) = v_[static_cast<size_t>(i)];
        return e;
    }

    int dim() const { return dim_; }
    int order() const { return order_; }
    size_t size() const { return v_.size(); }

    crational& at(std::initializer_list<int> idx) { return v_[flat(idx.begin(), idx.size())]; }
    const crational& at(std::initializer_list<int> idx) const {
        return v_[flat(idx.begin(), idx.size())];
    }
    crational& at(std::span<const int> idx) { return v_[flat(idx.data(), idx.size())]; }
    const crational& at(std::span<const int> idx) const {
        return v_[flat(idx.data(), idx.size())];
    }
    crational& flat_at(size_t i) { return v_[i]; }
    const crational& flat_at(size_t i) const { return v_[i]; }

    // apply the multilinear map to order-1 arguments
    alg_elem apply(std::span<const alg_elem> args) const {
        if (static_cast<int>(args.size()) != order_ - 1)
            throw std::invalid_argument("tensor argument count mismatch");
        for (const auto& a : args)
            if (a.dim() != dim_) throw std::invalid_argument("algebra dimension mismatch");
        alg_elem out(dim_);
        std::vector<int> idx(static_cast<size_t>(order_), 0);
        for (size_t f = 0; f < v_.size(); ++f) {
            if (!v_[f].is_zero()) {
                crational term = v_[f];
                for (int m = 1; m < order_; ++m)
                    term *= args[static_cast<size_t>(m - 1)][idx[static_cast<size_t>(m)]];
                out.at(idx[0]) += term;
            }
            // odometer increment, last index fastest
            for (int m = order_ - 1; m >= 0; --m) {
                if (++idx[static_cast<size_t>(m)] < dim_) break;
                idx[static_cast<size_t>(m)] = 0;
            }
        }
        return out;
    }

    bool is_zero() const {
        for (const auto& x : v_)
            if (!x.is_zero()) return false;
        return true;
    }

    friend ctensor operator+(const ctensor& a, const ctensor& b) {
        check_shape(a, b);
        ctensor r = a;
        for (size_t i = 0; i < r.v_.size(); ++i) r.v_[i] += b.v_[i];
        return r;
    }
    friend ctensor operator-(const ctensor& a, const ctensor& b) {
        check_shape(a, b);
        ctensor r = a;
        for (size_t i = 0; i < r.v_.size(); ++i) r.v_[i] -= b.v_[i];
        return r;
    }
    friend ctensor operator*(const crational& s, const ctensor& a) {
        ctensor r = a;
        for (auto& x : r.v_) x *= s;
        return r;
    }
    friend bool operator==(const ctensor&, const ctensor&) = default;

  private:
    static size_t pow_size(int dim, int order) {
        size_t s = 1;
        for (int i = 0; i < order; ++i) s *= static_cast<size_t>(dim);
        return s;
    }
    static void check_shape(const ctensor& a, const ctensor& b) {
        if (a.dim_ != b.dim_ || a.order_ != b.order_)
            throw std::invalid_argument("tensor shape mismatch");
    }
    size_t flat(const int* idx, size_t len) const {
        if (static_cast<int>(len) != order_) throw std::invalid_argument("tensor index arity");
        size_t f = 0;
        for (size_t i = 0; i < len; ++i) {
            if (idx[i] < 0 || idx[i] >= dim_) throw std::out_of_range("tensor index");
            f = f * static_cast<size_t>(dim_) + static_cast<size_t>(idx[i]);
        }
        return f;
    }

    int dim_;
    int order_;
    std::vector<crational> v_;
};

}  // namespace opval
