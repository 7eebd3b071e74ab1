#pragma once

// Circular elements over B = C^d: models are a pair of covariance maps
// (eta1, eta2), the only nonzero cumulants, attached to the words (a, a*)
// and (a*, a). Includes the two builtin models, the alternating-moment
// recursion, the semicircular decomposition of (Re a, Im a) and the trace
// compatibility test.

#include <span>
#include <stdexcept>
#include <vector>

#include "opval/algebra.hpp"
#include "opval/map_family.hpp"
#include "opval/tensor.hpp"

namespace opval {

struct circular_model {
    algebra alg;
    linear_map eta1;  // cumulant of (a, a*)
    linear_map eta2;  // cumulant of (a*, a)

    circular_model(algebra a, linear_map e1, linear_map e2)
        : alg(a), eta1(std::move(e1)), eta2(std::move(e2)) {
        if (eta1.dim() != alg.dimension || eta2.dim() != alg.dimension)
            throw std::invalid_argument("covariance map dimension mismatch");
    }

    bool positivity_certified() const {
        return check_positive_map(eta1) && check_positive_map(eta2);
    }
};

// d = 2 model with eta1 = [[1/2,0],[1/2,1]] and eta2 = [[1/2,1/2],[0,1]];
// tracial for the uniform trace but with E(aa*) != E(a*a)
inline circular_model make_nofreepolar() {
    algebra alg(2);
    linear_map e1(2), e2(2);
    e1.at(0, 0) = crational(rational(1, 2));
    e1.at(1, 0) = crational(rational(1, 2));
    e1.at(1, 1) = crational(1);
    e2.at(0, 0) = crational(rational(1, 2));
    e2.at(0, 1) = crational(rational(1, 2));
    e2.at(1, 1) = crational(1);
    return {alg, std::move(e1), std::move(e2)};
}

// midpoint discretization of the one-sided integration kernels on [0,1]:
// eta1 rows integrate from the cell midpoint up to 1, eta2 is the flip
// conjugate, so the flip-twist identity holds exactly at every d
inline circular_model make_dt_discretized(int d) {
    algebra alg(d);
    linear_map e1(d);
    for (int i = 0; i < d; ++i) {
        e1.at(i, i) = crational(rational(1, 2 * d));
        for (int j = i + 1; j < d; ++j) e1.at(i, j) = crational(rational(1, d));
    }
    linear_map e2 = algebra_automorphism::flip(d).conjugate(e1);
    return {alg, std::move(e1), std::move(e2)};
}

// d = 1 circular element with covariance c
inline circular_model make_scalar_circular(const crational& c) {
    algebra alg(1);
    linear_map e(1);
    e.at(0, 0) = c;
    return {alg, e, e};
}

enum class alt_pattern { start_a, start_astar };

// E(a b_1 a* b_2 ... a b_{2n-1} a* b_{2n}) resp. the a*-leading variant,
// by the one-pair recursion: the pair containing the first letter closes
// after an inner alternating word of the opposite pattern and is followed
// by an independent alternating tail
inline alg_elem alternating_moment(const circular_model& model, alt_pattern pat,
                                   std::span<const alg_elem> args) {
    if (args.size() % 2 != 0) throw std::invalid_argument("odd argument count");
    for (const auto& a : args)
        if (a.dim() != model.alg.dimension) throw std::invalid_argument("dimension mismatch");
    const int n = static_cast<int>(args.size()) / 2;
    const alg_elem one = alg_elem::unit(model.alg);
    if (n == 0) return one;

    // memo[i][l][k]: moment of pattern i over args[l .. l+2k)
    std::vector<std::vector<std::vector<alg_elem>>> memo(
        2, std::vector<std::vector<alg_elem>>(args.size() + 1));
    std::vector<std::vector<std::vector<char>>> done(
        2, std::vector<std::vector<char>>(args.size() + 1));
    for (int i = 0; i < 2; ++i)
        for (size_t l = 0; l <= args.size(); ++l) {
            memo[i][l].assign(n + 1, alg_elem(model.alg.dimension));
            done[i][l].assign(n + 1, 0);
        }

    auto rec = [&](auto&& self, int i, int l, int k) -> const alg_elem& {
        auto& slot = memo[static_cast<size_t>(i)][static_cast<size_t>(l)][static_cast<size_t>(k)];
        auto& flag = done[static_cast<size_t>(i)][static_cast<size_t>(l)][static_cast<size_t>(k)];
        if (flag) return slot;
        flag = 1;
        if (k == 0) {
            slot = one;
            return slot;
        }
        const linear_map& eta = (i == 0) ? model.eta1 : model.eta2;
        alg_elem acc(model.alg.dimension);
        for (int k1 = 0; k1 + 1 <= k; ++k1) {
            const int k2 = k - 1 - k1;
            const alg_elem& inner = self(self, 1 - i, l + 1, k1);
            const alg_elem& tail = self(self, i, l + 2 * k1 + 2, k2);
            acc += eta.apply(args[static_cast<size_t>(l)] * inner) *
                   args[static_cast<size_t>(l + 2 * k1 + 1)] * tail;
        }
        slot = acc;
        return slot;
    };
    return rec(rec, pat == alt_pattern::start_a ? 0 : 1, 0, n);
}

struct semicircular_decomposition {
    linear_map g11, g12, g21, g22;  // covariances of (Re a, Im a)
    bool block_covariance_cp;       // positivity of the assembled 2x2 block map
};

// covariances of x1 = (a+a*)/2, x2 = (a-a*)/(2i); the block map eta(b) =
// [[g11(b), g12(b)], [g21(b), g22(b)]] is completely positive iff every
// per-coordinate 2x2 slice of eta applied to a basis projection is psd
inline semicircular_decomposition semicircular_covariance(const circular_model& m) {
    const crational quarter(rational(1, 4));
    const crational iq = crational(rational(0), rational(1, 4));
    semicircular_decomposition out{
        quarter * (m.eta1 + m.eta2), iq * (m.eta1 - m.eta2),
        (-iq) * (m.eta1 - m.eta2), quarter * (m.eta1 + m.eta2), true};
    const int d = m.alg.dimension;
    for (int j = 0; j < d && out.block_covariance_cp; ++j) {
        for (int i = 0; i < d; ++i) {
            // 2x2 slice [[p, q], [conj(q), r]] at coordinate i of eta(e_j)
            const crational p = out.g11.at(i, j);
            const crational q = out.g12.at(i, j);
            const crational r = out.g22.at(i, j);
            const crational det = p * r - q * q.conj();
            if (!p.is_real() || p.re < 0 || !r.is_real() || r.re < 0 || !det.is_real() ||
                det.re < 0 || out.g21.at(i, j) != q.conj()) {
                out.block_covariance_cp = false;
                break;
            }
        }
    }
    return out;
}

// tau(eta1(b1) b2) == tau(b1 eta2(b2)) on basis pairs
inline bool check_circular_trace(const circular_model& m, const trace_functional& tau) {
    if (tau.dim() != m.alg.dimension) throw std::invalid_argument("trace dimension mismatch");
    for (int i = 0; i < m.alg.dimension; ++i)
        for (int j = 0; j < m.alg.dimension; ++j) {
            // lhs = w_j * eta1[j][i], rhs = w_i * eta2[i][j]
            crational lhs = crational(tau.weights[static_cast<size_t>(j)]) * m.eta1.at(j, i);
            crational rhs = crational(tau.weights[static_cast<size_t>(i)]) * m.eta2.at(i, j);
            if (lhs != rhs) return false;
        }
    return true;
}

inline const std::vector<std::string>& circular_labels() {
    static const std::vector<std::string> l{"a", "a_star"};
    return l;
}

// sparse cumulant family with exactly the two order-2 tensors
inline map_family induced_cumulant_family(const circular_model& m, int N) {
    if (N < 2) throw std::invalid_argument("order must be >= 2");
    map_family fam(m.alg, circular_labels(), family_kind::cumulants, N, /*sparse=*/true);
    fam.set_map({0, 1}, ctensor::from_linear_map(m.eta1));
    fam.set_map({1, 0}, ctensor::from_linear_map(m.eta2));
    return fam;
}

}  // namespace opval
