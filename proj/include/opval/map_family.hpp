#pragma once

// Families of multilinear moment/cumulant maps indexed by words over a label
// set, with both conversion directions and the trace / self-adjointness
// checkers.
//
// The central recursion: for a noncrossing partition pi of {1..n} the nested
// map alphahat_j(pi) is evaluated by repeatedly removing an interval block
// {p..p+q-1}; the removed block's cumulant is applied to the enclosed
// arguments and spliced back into the surrounding argument list (interior
// position), or multiplied on the right (block at the right end) or on the
// left (block at the left end). Moments are the sum of alphahat_j(pi) over
// all pi in NC(n).
//
// Conversions between moment and cumulant families group NC(n) by the block
// containing position 1: the elements of that block cut the word into
// independent gaps, each carrying a full lower-order moment. This yields both
// directions in O(2^(n-1)) tensor contractions per word and is checked in the
// tests against the literal NC sum.

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opval/algebra.hpp"
#include "opval/ncpart.hpp"
#include "opval/tensor.hpp"

namespace opval {

using word = std::vector<int>;  // label indices

enum class family_kind { moments, cumulants };

class map_family {
  public:
    map_family(algebra alg, std::vector<std::string> labels, family_kind kind, int max_order,
               bool sparse = false)
        : alg_(alg), labels_(std::move(labels)), kind_(kind), max_order_(max_order),
          sparse_(sparse) {
        if (labels_.empty()) throw std::invalid_argument("family needs at least one label");
        if (max_order_ < 1) throw std::invalid_argument("max order must be >= 1");
    }

    const algebra& alg() const { return alg_; }
    const std::vector<std::string>& labels() const { return labels_; }
    int label_count() const { return static_cast<int>(labels_.size()); }
    family_kind kind() const { return kind_; }
    int max_order() const { return max_order_; }
    bool sparse() const { return sparse_; }

    void set_map(const word& j, ctensor t) {
        check_word(j);
        if (t.dim() != alg_.dimension || t.order() != static_cast<int>(j.size()))
            throw std::invalid_argument("tensor shape does not match word");
        maps_[j] = std::move(t);
    }

    bool has(const word& j) const { return maps_.count(j) != 0; }

    // the multilinear map for word j; absent words are zero only in sparse families
    ctensor map_tensor(const word& j) const {
        check_word(j);
        auto it = maps_.find(j);
        if (it != maps_.end()) return it->second;
        if (!sparse_) throw std::invalid_argument("family has no map for word " + word_str(j));
        return ctensor(alg_.dimension, static_cast<int>(j.size()));
    }

    const std::map<word, ctensor>& maps() const { return maps_; }

    std::string word_str(const word& j) const {
        std::string s;
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) s += ",";
            s += labels_[static_cast<size_t>(j[i])];
        }
        return "(" + s + ")";
    }

  private:
    void check_word(const word& j) const {
        if (j.empty()) throw std::invalid_argument("empty word");
        if (static_cast<int>(j.size()) > max_order_)
            throw std::invalid_argument("word length exceeds family max order");
        for (int v : j)
            if (v < 0 || v >= label_count()) throw std::invalid_argument("label out of range");
    }

    algebra alg_;
    std::vector<std::string> labels_;
    family_kind kind_;
    int max_order_;
    bool sparse_;
    std::map<word, ctensor> maps_;
};

namespace detail {

struct nested_state {
    word j;
    std::vector<std::vector<int>> blocks;  // 1-based positions
    std::vector<alg_elem> args;            // |j| - 1 arguments
};

inline bool is_interval(const std::vector<int>& b) {
    return b.back() - b.front() + 1 == static_cast<int>(b.size());
}

// removes blocks[bi] = {p..p+q-1} from the state per the three recursion cases
inline nested_state remove_interval_block(const map_family& fam, const nested_state& st,
                                          size_t bi, alg_elem* left_out, alg_elem* right_out) {
    const int n = static_cast<int>(st.j.size());
    const auto& blk = st.blocks[bi];
    const int p = blk.front();
    const int q = static_cast<int>(blk.size());

    word jin(st.j.begin() + (p - 1), st.j.begin() + (p - 1 + q));
    std::vector<alg_elem> inner_args;  // b_p .. b_{p+q-2}
    for (int m = p; m <= p + q - 2; ++m) inner_args.push_back(st.args[static_cast<size_t>(m - 1)]);
    alg_elem inner = fam.map_tensor(jin).apply(inner_args);

    nested_state out;
    out.j.assign(st.j.begin(), st.j.begin() + (p - 1));
    out.j.insert(out.j.end(), st.j.begin() + (p - 1 + q), st.j.end());
    for (size_t k = 0; k < st.blocks.size(); ++k) {
        if (k == bi) continue;
        std::vector<int> nb;
        for (int e : st.blocks[k]) nb.push_back(e > p + q - 1 ? e - q : e);
        out.blocks.push_back(std::move(nb));
    }

    if (p >= 2 && p + q - 1 < n) {
        // interior: splice b_{p-1} * inner * b_{p+q-1} into slot p-1
        for (int m = 1; m <= p - 2; ++m) out.args.push_back(st.args[static_cast<size_t>(m - 1)]);
        out.args.push_back(st.args[static_cast<size_t>(p - 2)] * inner *
                           st.args[static_cast<size_t>(p + q - 2)]);
        for (int m = p + q; m <= n - 1; ++m) out.args.push_back(st.args[static_cast<size_t>(m - 1)]);
    } else if (p >= 2) {
        // block at the right end: multiply b_{p-1} * inner on the right
        for (int m = 1; m <= p - 2; ++m) out.args.push_back(st.args[static_cast<size_t>(m - 1)]);
        *right_out = st.args[static_cast<size_t>(p - 2)] * inner;
    } else {
        // block at the left end: multiply inner * b_q on the left
        for (int m = q + 1; m <= n - 1; ++m) out.args.push_back(st.args[static_cast<size_t>(m - 1)]);
        *left_out = inner * st.args[static_cast<size_t>(q - 1)];
    }
    return out;
}

using block_chooser = std::function<size_t(size_t)>;  // candidate count -> chosen index

inline alg_elem eval_nested_rec(const map_family& fam, const nested_state& st,
                                const block_chooser* choose) {
    if (st.blocks.size() == 1) return fam.map_tensor(st.j).apply(st.args);

    std::vector<size_t> candidates;
    for (size_t k = 0; k < st.blocks.size(); ++k)
        if (is_interval(st.blocks[k])) candidates.push_back(k);
    size_t pick = candidates[choose ? (*choose)(candidates.size()) : 0];

    alg_elem left, right;
    bool has_left = false, has_right = false;
    const auto& blk = st.blocks[pick];
    const int p = blk.front();
    const int q = static_cast<int>(blk.size());
    const int n = static_cast<int>(st.j.size());
    if (p == 1 && q < n) has_left = true;
    if (p >= 2 && p + q - 1 == n) has_right = true;

    nested_state nxt = remove_interval_block(fam, st, pick, &left, &right);
    alg_elem sub = eval_nested_rec(fam, nxt, choose);
    if (has_left) return left * sub;
    if (has_right) return sub * right;
    return sub;
}

}  // namespace detail

// alphahat_j(pi)[args]; chooser (when given) selects which interval block is
// removed at each recursion level, for the order-independence tests
inline alg_elem eval_nested(const map_family& fam, const word& j, const partition& pi,
                            std::span<const alg_elem> args,
                            const detail::block_chooser* chooser = nullptr) {
    if (fam.kind() != family_kind::cumulants)
        throw std::invalid_argument("eval_nested needs a cumulant family");
    if (static_cast<int>(j.size()) != pi.n())
        throw std::invalid_argument("word length does not match partition");
    if (static_cast<int>(j.size()) > fam.max_order())
        throw std::invalid_argument("word length exceeds family max order");
    if (args.size() + 1 != j.size()) throw std::invalid_argument("argument count mismatch");
    detail::nested_state st{j, pi.blocks(), {args.begin(), args.end()}};
    return detail::eval_nested_rec(fam, st, chooser);
}

// moment value as the literal sum of alphahat_j(pi) over NC(n)
inline alg_elem moments_from_cumulants(const map_family& fam, const word& j,
                                       std::span<const alg_elem> args) {
    alg_elem acc = alg_elem::zero(fam.alg());
    for_each_noncrossing(static_cast<int>(j.size()), [&](const partition& pi) {
        acc += eval_nested(fam, j, pi, args);
    });
    return acc;
}

namespace detail {

// all words over l labels of length exactly n, lexicographic
inline std::vector<word> all_words(int l, int n) {
    std::vector<word> out;
    word w(static_cast<size_t>(n), 0);
    while (true) {
        out.push_back(w);
        int i = n - 1;
        for (; i >= 0; --i) {
            if (++w[static_cast<size_t>(i)] < l) break;
            w[static_cast<size_t>(i)] = 0;
        }
        if (i < 0) break;
    }
    return out;
}

// Shared kernel for both conversion directions. For the word j of length n
// and every tensor cell [t; k_1..k_{n-1}], accumulates the contributions of
// all noncrossing partitions whose first block V is a proper subset of
// {1..n}: cum(j|V) applied to the masked gap values, gaps evaluated in the
// `gaps` family. Requires gaps to hold moment tensors for all shorter words.
inline void add_first_block_terms(const std::map<word, ctensor>& cum,
                                  const std::map<word, ctensor>& gaps, const word& j,
                                  int dim, ctensor& out) {
    const int n = static_cast<int>(j.size());
    const auto zero_or = [dim](const std::map<word, ctensor>& tbl, const word& w) -> ctensor {
        auto it = tbl.find(w);
        if (it != tbl.end()) return it->second;
        return ctensor(dim, static_cast<int>(w.size()));
    };

    std::vector<int> cell(static_cast<size_t>(n), 0);  // [t, k_1..k_{n-1}]
    // enumerate first blocks V = {1} + subset of {2..n}, V != {1..n}
    const unsigned mmax = 1u << (n - 1);
    for (unsigned mask = 0; mask < mmax; ++mask) {
        std::vector<int> V{1};
        for (int b = 0; b < n - 1; ++b)
            if (mask & (1u << b)) V.push_back(b + 2);
        if (static_cast<int>(V.size()) == n) continue;  // the full block is the excluded top term
        const int q = static_cast<int>(V.size());
        word jV;
        for (int v : V) jV.push_back(j[static_cast<size_t>(v - 1)]);
        ctensor cV = zero_or(cum, jV);
        if (cV.is_zero()) continue;

        // gap moment tensors between consecutive V elements, plus the tail
        std::vector<word> gap_words;
        for (int i = 0; i + 1 < q; ++i) {
            word g;
            for (int m = V[static_cast<size_t>(i)] + 1; m <= V[static_cast<size_t>(i + 1)] - 1; ++m)
                g.push_back(j[static_cast<size_t>(m - 1)]);
            gap_words.push_back(std::move(g));
        }
        word tail;
        for (int m = V[static_cast<size_t>(q - 1)] + 1; m <= n; ++m)
            tail.push_back(j[static_cast<size_t>(m - 1)]);

        std::vector<ctensor> gap_t;
        for (const auto& g : gap_words)
            gap_t.push_back(g.empty() ? ctensor() : zero_or(gaps, g));
        ctensor tail_t = tail.empty() ? ctensor() : zero_or(gaps, tail);

        // iterate all cells
        std::fill(cell.begin(), cell.end(), 0);
        const size_t cells = out.size();
        for (size_t f = 0; f < cells; ++f) {
            // cell = [t, k_1..k_{n-1}]
            do {
                const int t = cell[0];
                // tail forces t == k_{v_q} and multiplies its moment value
                crational term(1);
                if (!tail.empty()) {
                    const int vq = V[static_cast<size_t>(q - 1)];
                    if (cell[0] != cell[static_cast<size_t>(vq)]) { term = crational(); break; }
                    std::vector<int> tidx{t};
                    for (int m = vq + 1; m <= n - 1; ++m) tidx.push_back(cell[static_cast<size_t>(m)]);
                    term *= tail_t.at(std::span<const int>(tidx));
                    if (term.is_zero()) break;
                }
                // argument slots of cum(j|V): masked gap values
                std::vector<int> cidx{t};
                bool zero = false;
                for (int i = 0; i + 1 < q; ++i) {
                    const int vi = V[static_cast<size_t>(i)];
                    const int vn = V[static_cast<size_t>(i + 1)];
                    const int ki = cell[static_cast<size_t>(vi)];
                    if (vn == vi + 1) {
                        cidx.push_back(ki);  // empty gap: the bare coefficient b_{v_i}
                        continue;
                    }
                    if (ki != cell[static_cast<size_t>(vn - 1)]) { zero = true; break; }
                    std::vector<int> gidx{ki};
                    for (int m = vi + 1; m <= vn - 2; ++m) gidx.push_back(cell[static_cast<size_t>(m)]);
                    term *= gap_t[static_cast<size_t>(i)].at(std::span<const int>(gidx));
                    if (term.is_zero()) { zero = true; break; }
                    cidx.push_back(ki);
                }
                if (zero || term.is_zero()) break;
                term *= cV.at(std::span<const int>(cidx));
                if (!term.is_zero()) out.flat_at(f) += term;
            } while (false);
            for (int m = n - 1; m >= 0; --m) {
                if (++cell[static_cast<size_t>(m)] < dim) break;
                cell[static_cast<size_t>(m)] = 0;
            }
        }
    }
}

}  // namespace detail

// full moment family psi_j for all words up to order N
inline map_family moment_family_from_cumulants(const map_family& fam, int N) {
    if (fam.kind() != family_kind::cumulants)
        throw std::invalid_argument("expected a cumulant family");
    if (N > fam.max_order()) throw std::invalid_argument("order exceeds family max order");
    map_family out(fam.alg(), fam.labels(), family_kind::moments, N);
    std::map<word, ctensor> cum;
    for (int n = 1; n <= N; ++n)
        for (const auto& j : detail::all_words(fam.label_count(), n)) cum[j] = fam.map_tensor(j);
    std::map<word, ctensor> mom;
    for (int n = 1; n <= N; ++n) {
        for (const auto& j : detail::all_words(fam.label_count(), n)) {
            ctensor t = cum[j];  // the full-block term
            detail::add_first_block_terms(cum, mom, j, fam.alg().dimension, t);
            mom[j] = t;
            out.set_map(j, std::move(t));
        }
    }
    return out;
}

// solves the moment-cumulant relation for the cumulants by subtracting, for
// each word, every nested term whose first block is proper
inline map_family cumulants_from_moments(const map_family& fam, int N) {
    if (fam.kind() != family_kind::moments)
        throw std::invalid_argument("expected a moment family");
    if (N > fam.max_order()) throw std::invalid_argument("incomplete moment data for order");
    map_family out(fam.alg(), fam.labels(), family_kind::cumulants, N);
    std::map<word, ctensor> mom;
    for (int n = 1; n <= N; ++n)
        for (const auto& j : detail::all_words(fam.label_count(), n)) mom[j] = fam.map_tensor(j);
    std::map<word, ctensor> cum;
    for (int n = 1; n <= N; ++n) {
        for (const auto& j : detail::all_words(fam.label_count(), n)) {
            ctensor sub(fam.alg().dimension, n);
            detail::add_first_block_terms(cum, mom, j, fam.alg().dimension, sub);
            ctensor t = mom[j] - sub;
            cum[j] = t;
            out.set_map(j, std::move(t));
        }
    }
    return out;
}

struct family_violation {
    word j;
    std::vector<int> tuple;  // basis indices
    crational lhs;
    crational rhs;
};

struct family_check_result {
    bool ok = true;
    std::optional<family_violation> violation;
};

inline word cyclic_shift(const word& j) {
    word c(j.begin() + 1, j.end());
    c.push_back(j.front());
    return c;
}

// trace compatibility of the cumulant maps: tau(alpha_j(b_1..b_{n-1}) b_n)
// must equal tau(b_1 alpha_{c(j)}(b_2..b_n)) on all basis tuples
inline family_check_result check_trace_condition(const map_family& fam,
                                                 const trace_functional& tau, int L) {
    if (fam.kind() != family_kind::cumulants)
        throw std::invalid_argument("trace check needs a cumulant family");
    if (tau.dim() != fam.alg().dimension) throw std::invalid_argument("trace dimension mismatch");
    const int d = fam.alg().dimension;
    for (int n = 1; n <= L; ++n) {
        for (const auto& j : detail::all_words(fam.label_count(), n)) {
            const ctensor tj = fam.map_tensor(j);
            const ctensor tc = fam.map_tensor(cyclic_shift(j));
            std::vector<int> k(static_cast<size_t>(n), 0);  // basis tuple (k_1..k_n)
            while (true) {
                // lhs = tau(alpha_j(e_{k_1}..e_{k_{n-1}}) * e_{k_n}) = w_{k_n} * T[k_n; k_1..]
                std::vector<int> li{k[static_cast<size_t>(n - 1)]};
                li.insert(li.end(), k.begin(), k.end() - 1);
                crational lhs = crational(tau.weights[static_cast<size_t>(k[static_cast<size_t>(n - 1)])]) *
                                tj.at(std::span<const int>(li));
                // rhs = tau(e_{k_1} * alpha_{c(j)}(e_{k_2}..e_{k_n})) = w_{k_1} * Tc[k_1; k_2..]
                std::vector<int> ri{k[0]};
                ri.insert(ri.end(), k.begin() + 1, k.end());
                crational rhs = crational(tau.weights[static_cast<size_t>(k[0])]) *
                                tc.at(std::span<const int>(ri));
                if (lhs != rhs) return {false, family_violation{j, k, lhs, rhs}};
                int m = n - 1;
                for (; m >= 0; --m) {
                    if (++k[static_cast<size_t>(m)] < d) break;
                    k[static_cast<size_t>(m)] = 0;
                }
                if (m < 0) break;
            }
        }
    }
    return {};
}

// self-adjointness: alpha_j(b_1..b_{n-1})^* = alpha_{s~(j)}(b*_{n-1}..b*_1),
// with s~ reversing the word and applying the label involution
inline family_check_result check_selfadjoint(const map_family& fam, const std::vector<int>& s,
                                             int L) {
    if (fam.kind() != family_kind::cumulants)
        throw std::invalid_argument("self-adjointness check needs a cumulant family");
    if (static_cast<int>(s.size()) != fam.label_count())
        throw std::invalid_argument("involution size mismatch");
    for (int i = 0; i < fam.label_count(); ++i)
        if (s[static_cast<size_t>(i)] < 0 || s[static_cast<size_t>(i)] >= fam.label_count() ||
            s[static_cast<size_t>(s[static_cast<size_t>(i)])] != i)
            throw std::invalid_argument("not an involution");
    const int d = fam.alg().dimension;
    for (int n = 1; n <= L; ++n) {
        for (const auto& j : detail::all_words(fam.label_count(), n)) {
            word js(j.rbegin(), j.rend());
            for (auto& v : js) v = s[static_cast<size_t>(v)];
            const ctensor tj = fam.map_tensor(j);
            const ctensor ts = fam.map_tensor(js);
            // on basis tuples conjugation is entrywise: T[t; k_1..k_{n-1}]^* must
            // equal Ts[t; k_{n-1}..k_1]
            std::vector<int> k(static_cast<size_t>(n), 0);
            while (true) {
                std::vector<int> ri{k[0]};
                ri.insert(ri.end(), k.rbegin(), k.rend() - 1);
                crational lhs = tj.at(std::span<const int>(k)).conj();
                crational rhs = ts.at(std::span<const int>(ri));
                if (lhs != rhs) return {false, family_violation{j, k, lhs, rhs}};
                int m = n - 1;
                for (; m >= 0; --m) {
                    if (++k[static_cast<size_t>(m)] < d) break;
                    k[static_cast<size_t>(m)] = 0;
                }
                if (m < 0) break;
            }
        }
    }
    return {};
}

}  // namespace opval
