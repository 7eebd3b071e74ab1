#pragma once

// Executable R-diagonality certificates.
//
// Label convention throughout: index 0 is a, index 1 is a*. A family is
// R-diagonal iff every cumulant away from the even alternating words
// (0,1,0,1,...) and (1,0,1,0,...) vanishes. The word-side test expects zero
// for every admissible product of alternating words (odd-length words raw,
// even-length words centered), and the 2x2-matrix test checks freeness of
// z = [[0,a],[a*,0]] from M_2(B) over the diagonal copy of B+B by symbolic
// matrix bookkeeping that reduces every entry to plain moments of a.

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opval/algebra.hpp"
#include "opval/circular.hpp"
#include "opval/map_family.hpp"
#include "opval/ncpart.hpp"
#include "opval/tensor.hpp"

namespace opval {

// cumulant data of an R-diagonal element: pairs (beta1_k, beta2_k) of
// order-2k maps for the alternating words starting with a resp. a*; indices
// between betas.size() and the declared bound carry implicitly zero maps,
// which are never materialized (they get big quickly in high dimension)
struct rdiag_model {
    algebra alg;
    std::vector<std::pair<ctensor, ctensor>> betas;  // index k-1 holds order-2k tensors

    rdiag_model(algebra a, std::vector<std::pair<ctensor, ctensor>> b, int declared_k = -1)
        : alg(a), betas(std::move(b)),
          max_k_(std::max(declared_k, static_cast<int>(betas.size()))) {
        for (size_t k = 1; k <= betas.size(); ++k) {
            const auto& [b1, b2] = betas[k - 1];
            if (b1.dim() != alg.dimension || b2.dim() != alg.dimension ||
                b1.order() != static_cast<int>(2 * k) || b2.order() != static_cast<int>(2 * k))
                throw std::invalid_argument("beta tensor shape mismatch");
        }
        if (max_k_ < 1) throw std::invalid_argument("model needs at least one order");
    }

    static rdiag_model from_circular(const circular_model& m, int K = 1) {
        std::vector<std::pair<ctensor, ctensor>> b;
        b.emplace_back(ctensor::from_linear_map(m.eta1), ctensor::from_linear_map(m.eta2));
        return rdiag_model(m.alg, std::move(b), K);
    }

    int max_k() const { return max_k_; }
    int stored_k() const { return static_cast<int>(betas.size()); }

  private:
    int max_k_;
};

inline word alternating_word(int first_label, int length) {
    word j(static_cast<size_t>(length));
    for (int i = 0; i < length; ++i) j[static_cast<size_t>(i)] = (first_label + i) % 2;
    return j;
}

// sparse cumulant family carrying only the alternating even words
inline map_family induced_cumulant_family(const rdiag_model& m, int N) {
    if (N < 2 * m.stored_k()) throw std::invalid_argument("order too small for model");
    map_family fam(m.alg, circular_labels(), family_kind::cumulants, N, /*sparse=*/true);
    for (int k = 1; k <= m.stored_k(); ++k) {
        fam.set_map(alternating_word(0, 2 * k), m.betas[static_cast<size_t>(k - 1)].first);
        fam.set_map(alternating_word(1, 2 * k), m.betas[static_cast<size_t>(k - 1)].second);
    }
    return fam;
}

struct rdiag_word_violation {
    word j;                    // the violating word (cumulant mode) or assembled letters
    std::string description;   // human-readable reproduction data
    alg_elem value;
};

struct rdiag_check_result {
    bool ok = true;
    std::optional<rdiag_word_violation> violation;
};

// cumulant-side certificate: every tensor away from even alternating words
// must vanish
inline rdiag_check_result check_rdiag_cumulants(const map_family& fam, int K) {
    if (fam.kind() != family_kind::cumulants)
        throw std::invalid_argument("cumulant certificate needs a cumulant family");
    if (fam.label_count() != 2) throw std::invalid_argument("expected labels {a, a*}");
    for (int n = 1; n <= 2 * K; ++n) {
        for (const auto& j : detail::all_words(2, n)) {
            if (n % 2 == 0 && (j == alternating_word(0, n) || j == alternating_word(1, n)))
                continue;
            ctensor t = fam.map_tensor(j);
            if (!t.is_zero()) {
                alg_elem witness(fam.alg().dimension);
                return {false, rdiag_word_violation{j, "nonzero cumulant at " + fam.word_str(j),
                                                    witness}};
            }
        }
    }
    return {};
}

namespace detail {

// coefficient-dressed word c_0 a^{x_1} c_1 ... a^{x_m} c_m
struct bword {
    word letters;                 // label indices, may be empty
    std::vector<alg_elem> coeffs; // letters.size() + 1 entries

    bool trivially_zero() const {
        for (const auto& c : coeffs)
            if (c.is_zero()) return true;
        return false;
    }
};

inline alg_elem expect_bword(const map_family& moments, const bword& w) {
    if (w.letters.empty()) return w.coeffs.front();
    if (w.trivially_zero()) return alg_elem::zero(moments.alg());
    std::vector<alg_elem> inner(w.coeffs.begin() + 1, w.coeffs.end() - 1);
    alg_elem v = moments.map_tensor(w.letters).apply(inner);
    return w.coeffs.front() * v * w.coeffs.back();
}

inline bword concat(const bword& a, const bword& b) {
    bword r;
    r.letters = a.letters;
    r.letters.insert(r.letters.end(), b.letters.begin(), b.letters.end());
    r.coeffs.assign(a.coeffs.begin(), a.coeffs.end() - 1);
    r.coeffs.push_back(a.coeffs.back() * b.coeffs.front());
    r.coeffs.insert(r.coeffs.end(), b.coeffs.begin() + 1, b.coeffs.end());
    return r;
}

}  // namespace detail

// E( prod over blocks of sigma(eps) of (w_B - E(w_B)) ) with w_B the block's
// dressed word; expanded into 2^{#blocks} signed plain moments
inline alg_elem centered_alternating_expectation(const map_family& moments, const star_word& eps,
                                                 std::span<const alg_elem> coeffs) {
    if (moments.kind() != family_kind::moments)
        throw std::invalid_argument("expected a moment family");
    if (static_cast<int>(coeffs.size()) != eps.size())
        throw std::invalid_argument("coefficient count mismatch");
    if (eps.size() > moments.max_order()) throw std::invalid_argument("word order overflow");
    const alg_elem one = alg_elem::unit(moments.alg());

    partition sigma = max_alt_interval_partition(eps);
    std::vector<detail::bword> block_words;
    for (const auto& blk : sigma.blocks()) {
        detail::bword w;
        w.coeffs.push_back(one);
        for (int pos : blk) {
            w.letters.push_back(eps.sym[static_cast<size_t>(pos - 1)]);
            w.coeffs.push_back(coeffs[static_cast<size_t>(pos - 1)]);
        }
        block_words.push_back(std::move(w));
    }

    const size_t nb = block_words.size();
    alg_elem acc(moments.alg().dimension);
    for (unsigned mask = 0; mask < (1u << nb); ++mask) {
        detail::bword prod;
        prod.coeffs.push_back(one);
        int sign = 1;
        for (size_t b = 0; b < nb; ++b) {
            if (mask & (1u << b)) {
                sign = -sign;
                detail::bword ew;
                ew.coeffs.push_back(expect_bword(moments, block_words[b]));
                prod = detail::concat(prod, ew);
            } else {
                prod = detail::concat(prod, block_words[b]);
            }
        }
        alg_elem v = expect_bword(moments, prod);
        acc += (sign < 0) ? -v : v;
    }
    return acc;
}

// word-side certificate. Products x_1...x_m with x_t drawn from the four
// alternating families chained by start/end labels; odd-length words enter
// raw, even-length words centered; every coefficient ranges over the basis.
// True iff every expectation vanishes; the first violation is reported with
// full reproduction data.
inline rdiag_check_result check_rdiag_words(const map_family& moments, int L) {
    if (moments.kind() != family_kind::moments)
        throw std::invalid_argument("expected a moment family");
    if (moments.label_count() != 2) throw std::invalid_argument("expected labels {a, a*}");
    const int d = moments.alg().dimension;
    const alg_elem one = alg_elem::unit(moments.alg());

    // factor shape: start label s, letter count len; letters alternate; the
    // factor is centered iff len is even
    struct factor_shape {
        int start;
        int len;
    };

    rdiag_check_result result;

    // enumerate chains of factor shapes depth-first, then coefficients
    std::vector<factor_shape> shapes;
    auto test_shapes = [&](const std::vector<factor_shape>& fs) -> bool {
        // letters of each factor
        std::vector<word> letters;
        int total = 0;
        for (const auto& f : fs) {
            word w;
            for (int i = 0; i < f.len; ++i) w.push_back((f.start + i) % 2);
            total += f.len;
            letters.push_back(std::move(w));
        }
        // coefficient slots: len+1 per factor
        std::vector<std::vector<int>> slots;
        for (const auto& f : fs) slots.emplace_back(static_cast<size_t>(f.len) + 1, 0);
        while (true) {
            // build factors, expanding centered ones later via the mask
            std::vector<detail::bword> factors;
            std::vector<char> centered;
            for (size_t t = 0; t < fs.size(); ++t) {
                detail::bword w;
                w.letters = letters[t];
                for (int idx : slots[t]) w.coeffs.push_back(alg_elem::basis(moments.alg(), idx));
                factors.push_back(std::move(w));
                centered.push_back(fs[t].len % 2 == 0);
            }
            // expectation of the product of (factor - E factor) for centered ones
            alg_elem acc(d);
            const size_t nf = factors.size();
            unsigned cmask_limit = 1;
            std::vector<size_t> centered_idx;
            for (size_t t = 0; t < nf; ++t)
                if (centered[t]) centered_idx.push_back(t);
            cmask_limit = 1u << centered_idx.size();
            for (unsigned cm = 0; cm < cmask_limit; ++cm) {
                detail::bword prod;
                prod.coeffs.push_back(one);
                int sign = 1;
                for (size_t t = 0; t < nf; ++t) {
                    bool subst = false;
                    for (size_t ci = 0; ci < centered_idx.size(); ++ci)
                        if (centered_idx[ci] == t && (cm & (1u << ci))) subst = true;
                    if (subst) {
                        sign = -sign;
                        detail::bword ew;
                        ew.coeffs.push_back(detail::expect_bword(moments, factors[t]));
                        prod = detail::concat(prod, ew);
                    } else {
                        prod = detail::concat(prod, factors[t]);
                    }
                }
                alg_elem v = detail::expect_bword(moments, prod);
                acc += (sign < 0) ? -v : v;
            }
            if (!acc.is_zero()) {
                word all_letters;
                std::string desc = "product of " + std::to_string(nf) + " factors, letters ";
                for (size_t t = 0; t < nf; ++t) {
                    for (int v : letters[t]) all_letters.push_back(v);
                    desc += (t ? "|" : "") + moments.word_str(letters[t]);
                }
                desc += ", basis slots ";
                for (size_t t = 0; t < nf; ++t) {
                    desc += t ? "|" : "";
                    for (size_t u = 0; u < slots[t].size(); ++u)
                        desc += (u ? "," : "") + std::to_string(slots[t][u]);
                }
                result = {false, rdiag_word_violation{all_letters, desc, acc}};
                return false;
            }
            // advance coefficient odometer
            size_t t = 0;
            while (t < slots.size()) {
                size_t u = 0;
                bool carried = true;
                for (u = 0; u < slots[t].size(); ++u) {
                    if (++slots[t][u] < d) { carried = false; break; }
                    slots[t][u] = 0;
                }
                if (!carried) break;
                ++t;
            }
            if (t == slots.size()) break;
        }
        return true;
    };

    auto rec = [&](auto&& self, int budget, int chain_label) -> bool {
        if (!shapes.empty())
            if (!test_shapes(shapes)) return false;
        // extend by one more factor starting at chain_label
        for (int len = 1; len <= budget; ++len) {
            // alternation fixes the end label: start + len - 1 mod 2
            shapes.push_back({chain_label, len});
            const int end_label = (chain_label + len - 1) % 2;
            // the next factor starts with the same letter as this one ended
            if (!self(self, budget - len, end_label)) {
                shapes.pop_back();
                return false;
            }
            shapes.pop_back();
        }
        return true;
    };

    for (int first = 0; first < 2 && result.ok; ++first) rec(rec, L, first);
    return result;
}

namespace detail {

// entry-level formal sum of dressed words, for the 2x2 bookkeeping
struct bword_sum {
    std::vector<std::pair<int, bword>> terms;  // sign, word

    bool empty() const { return terms.empty(); }
};

inline bword_sum mul(const bword_sum& a, const bword_sum& b) {
    bword_sum r;
    for (const auto& [sa, wa] : a.terms)
        for (const auto& [sb, wb] : b.terms) {
            bword w = concat(wa, wb);
            if (!w.trivially_zero()) r.terms.push_back({sa * sb, w});
        }
    return r;
}

inline alg_elem expect_sum(const map_family& moments, const bword_sum& s, int d) {
    alg_elem acc(d);
    for (const auto& [sg, w] : s.terms) {
        alg_elem v = expect_bword(moments, w);
        acc += (sg < 0) ? -v : v;
    }
    return acc;
}

struct matrix2 {
    // 2x2 matrix of formal sums
    std::array<std::array<bword_sum, 2>, 2> e;

    bool all_empty() const {
        return e[0][0].empty() && e[0][1].empty() && e[1][0].empty() && e[1][1].empty();
    }
};

inline matrix2 mul(const matrix2& a, const matrix2& b) {
    matrix2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                bword_sum p = mul(a.e[static_cast<size_t>(i)][static_cast<size_t>(k)],
                                  b.e[static_cast<size_t>(k)][static_cast<size_t>(j)]);
                auto& dst = r.e[static_cast<size_t>(i)][static_cast<size_t>(j)];
                dst.terms.insert(dst.terms.end(), p.terms.begin(), p.terms.end());
            }
    return r;
}

}  // namespace detail

enum class m2_status { pass, violation, budget_exceeded };

struct m2_result {
    m2_status status = m2_status::pass;
    long products_checked = 0;
    std::string witness;
};

// freeness of z = [[0,a],[a*,0]] from M_2(B) over the diagonal subalgebra:
// alternating products of centered z-monomials r (degree <= D, diagonal
// coefficients over the basis of B+B) and off-diagonal matrix units must
// have vanishing diagonal expectation. Every product reduces to plain
// moments of a by 2x2 bookkeeping. Matrix-unit sides along a chain are
// forced by the leading one (anything else is the zero matrix), so only the
// leading side and the B-basis slots are enumerated.
inline m2_result m2_freeness_check(const map_family& moments, int L, int D,
                                   long budget = 5'000'000) {
    if (moments.kind() != family_kind::moments)
        throw std::invalid_argument("expected a moment family");
    const int d = moments.alg().dimension;
    if (static_cast<long long>(L) * D > moments.max_order())
        throw std::invalid_argument("moment data too shallow for L*D letters");

    m2_result result;

    // a centered z-monomial of degree e entering at row `side`: the letters and
    // the sides of its diagonal coefficients are forced by alternation
    auto build_monomial = [&](int e, int side, std::span<const int> basis) -> detail::matrix2 {
        detail::matrix2 m;
        detail::bword w;
        w.coeffs.push_back(alg_elem::basis(moments.alg(), basis[0]));
        const int side0 = side;
        for (int t = 0; t < e; ++t) {
            w.letters.push_back(side == 0 ? 0 : 1);  // z[0][1] = a, z[1][0] = a*
            side = 1 - side;
            w.coeffs.push_back(alg_elem::basis(moments.alg(), basis[static_cast<size_t>(t) + 1]));
        }
        m.e[static_cast<size_t>(side0)][static_cast<size_t>(side)].terms.push_back({1, w});
        if (side0 == side) {  // diagonal entry: center it
            detail::bword ew;
            ew.coeffs.push_back(detail::expect_bword(moments, w));
            if (!ew.coeffs.front().is_zero())
                m.e[static_cast<size_t>(side0)][static_cast<size_t>(side)].terms.push_back({-1, ew});
        }
        return m;
    };

    auto build_offdiag = [&](int side, int basis) -> detail::matrix2 {
        detail::matrix2 m;
        detail::bword w;
        w.coeffs.push_back(alg_elem::basis(moments.alg(), basis));
        m.e[static_cast<size_t>(side)][static_cast<size_t>(1 - side)].terms.push_back({1, w});
        return m;
    };

    // one of the four product forms with n monomials of degrees `degs`
    auto test_products = [&](std::span<const int> degs, bool lead_b, bool trail_b) -> bool {
        const int n = static_cast<int>(degs.size());
        const int nb = (n - 1) + (lead_b ? 1 : 0) + (trail_b ? 1 : 0);
        int slots = nb;
        for (int e : degs) slots += e + 1;
        std::vector<int> basis(static_cast<size_t>(slots), 0);
        for (int lead_side = 0; lead_side < 2; ++lead_side) {
            std::fill(basis.begin(), basis.end(), 0);
            while (true) {
                if (++result.products_checked > budget) {
                    result.status = m2_status::budget_exceeded;
                    return false;
                }
                detail::matrix2 prod;
                bool first = true;
                int side = lead_side;
                size_t bp = 0;
                auto mulin = [&](const detail::matrix2& m) {
                    prod = first ? m : detail::mul(prod, m);
                    first = false;
                };
                if (lead_b) {
                    mulin(build_offdiag(side, basis[bp++]));
                    side = 1 - side;
                }
                for (int t = 0; t < n; ++t) {
                    const int e = degs[static_cast<size_t>(t)];
                    mulin(build_monomial(e, side,
                                         std::span<const int>(basis).subspan(bp,
                                                                             static_cast<size_t>(e) + 1)));
                    bp += static_cast<size_t>(e) + 1;
                    side = (side + e) % 2;
                    if (t + 1 < n) {
                        mulin(build_offdiag(side, basis[bp++]));
                        side = 1 - side;
                    }
                }
                if (trail_b) mulin(build_offdiag(side, basis[bp++]));
                for (int i = 0; i < 2; ++i) {
                    alg_elem v = detail::expect_sum(
                        moments, prod.e[static_cast<size_t>(i)][static_cast<size_t>(i)], d);
                    if (!v.is_zero()) {
                        result.status = m2_status::violation;
                        result.witness = "degrees ";
                        for (int e : degs) result.witness += std::to_string(e);
                        result.witness += lead_b ? " lead_b" : "";
                        result.witness += trail_b ? " trail_b" : "";
                        result.witness += " lead_side=" + std::to_string(lead_side) +
                                          " diagonal=" + std::to_string(i) + " basis ";
                        for (int bidx : basis) result.witness += std::to_string(bidx);
                        return false;
                    }
                }
                size_t u = 0;
                for (; u < basis.size(); ++u) {
                    if (++basis[u] < d) break;
                    basis[u] = 0;
                }
                if (u == basis.size()) break;
            }
        }
        return true;
    };

    // enumerate degree tuples for n = 1..L
    for (int n = 1; n <= L; ++n) {
        std::vector<int> degs(static_cast<size_t>(n), 1);
        while (true) {
            if (!test_products(degs, false, true)) return result;
            if (!test_products(degs, false, false)) return result;
            if (!test_products(degs, true, true)) return result;
            if (!test_products(degs, true, false)) return result;
            size_t u = 0;
            for (; u < degs.size(); ++u) {
                if (++degs[u] <= D) break;
                degs[u] = 1;
            }
            if (u == degs.size()) break;
        }
    }
    return result;
}

// beta_k^{(1)} == beta_k^{(2)} for all k; the implicit zero tail is
// symmetric by definition
inline bool check_beta_symmetry(const rdiag_model& m) {
    for (const auto& [b1, b2] : m.betas)
        if (!(b1 == b2)) return false;
    return true;
}

struct theta_twist_result {
    bool ok = true;
    int k = 0;
    std::vector<int> tuple;
};

// beta_k^{(2)}(b1, th(b2), b3, ..., th(b_{2k-2}), b_{2k-1})
//   == th( beta_k^{(1)}(th(b1), b2, ..., b_{2k-2}, th(b_{2k-1})) )
// on all basis tuples
inline theta_twist_result check_theta_twist(const rdiag_model& m,
                                            const algebra_automorphism& theta) {
    if (theta.dim() != m.alg.dimension) throw std::invalid_argument("automorphism dimension");
    const int d = m.alg.dimension;
    // absent orders are zero maps; the identity holds there trivially
    for (int k = 1; k <= m.stored_k(); ++k) {
        const auto& [b1t, b2t] = m.betas[static_cast<size_t>(k - 1)];
        if (b1t.is_zero() && b2t.is_zero()) continue;
        const int nargs = 2 * k - 1;
        std::vector<int> tup(static_cast<size_t>(nargs), 0);
        while (true) {
            std::vector<alg_elem> lhs_args, rhs_args;
            for (int i = 0; i < nargs; ++i) {
                alg_elem b = alg_elem::basis(m.alg, tup[static_cast<size_t>(i)]);
                // odd positions (1-based) stay, even positions twisted on the lhs
                lhs_args.push_back(i % 2 == 1 ? theta.apply(b) : b);
                rhs_args.push_back(i % 2 == 0 ? theta.apply(b) : b);
            }
            alg_elem lhs = b2t.apply(lhs_args);
            alg_elem rhs = theta.apply(b1t.apply(rhs_args));
            if (!(lhs == rhs)) return {false, k, tup};
            int i = nargs - 1;
            for (; i >= 0; --i) {
                if (++tup[static_cast<size_t>(i)] < d) break;
                tup[static_cast<size_t>(i)] = 0;
            }
            if (i < 0) break;
        }
    }
    return {};
}

enum class polar_verdict { obstructed, unobstructed, inconclusive };

struct polar_obstruction_result {
    polar_verdict verdict;
    alg_elem e_astar_a;  // E(a* a)
    alg_elem e_a_astar;  // E(a a*)
};

// compares E(a*a) and E(aa*): when E(a*a) is scalar, a realization a = up
// with u unitary, p self-adjoint and {u,u*} free from {p} forces equality
inline polar_obstruction_result check_polar_obstruction(const map_family& moments) {
    if (moments.kind() != family_kind::moments)
        throw std::invalid_argument("expected a moment family");
    const alg_elem one = alg_elem::unit(moments.alg());
    std::vector<alg_elem> u{one};
    alg_elem eaa = moments.map_tensor({1, 0}).apply(u);  // E(a* 1 a)
    alg_elem eas = moments.map_tensor({0, 1}).apply(u);  // E(a 1 a*)
    if (!eaa.is_scalar()) return {polar_verdict::inconclusive, eaa, eas};
    if (eaa == eas) return {polar_verdict::unobstructed, eaa, eas};
    return {polar_verdict::obstructed, eaa, eas};
}

}  // namespace opval
