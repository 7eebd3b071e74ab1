#pragma once

// shared helpers for the test suite: deterministic random families and models

#include <random>

#include "opval/circular.hpp"
#include "opval/map_family.hpp"
#include "opval/rdiag.hpp"

namespace opval::testing {

inline crational random_crational(std::mt19937_64& rng, bool complex_parts = true) {
    std::uniform_int_distribution<int> num(-3, 3);
    std::uniform_int_distribution<int> den(1, 3);
    rational re(num(rng), den(rng));
    rational im = complex_parts ? rational(num(rng), den(rng)) : rational(0);
    return {re, im};
}

inline alg_elem random_elem(std::mt19937_64& rng, int d, bool complex_parts = true) {
    std::vector<crational> c;
    for (int i = 0; i < d; ++i) c.push_back(random_crational(rng, complex_parts));
    return alg_elem(std::move(c));
}

inline ctensor random_tensor(std::mt19937_64& rng, int d, int order, bool complex_parts = true) {
    ctensor t(d, order);
    for (size_t i = 0; i < t.size(); ++i) t.flat_at(i) = random_crational(rng, complex_parts);
    return t;
}

// dense cumulant family over two labels with random rational tensors
inline map_family random_cumulant_family(std::mt19937_64& rng, int d, int N,
                                         bool complex_parts = true) {
    map_family fam(algebra(d), {"a", "a_star"}, family_kind::cumulants, N);
    word w;
    auto rec = [&](auto&& self, int len) -> void {
        if (len > 0) fam.set_map(w, random_tensor(rng, d, len, complex_parts));
        if (len == N) return;
        for (int v = 0; v < 2; ++v) {
            w.push_back(v);
            self(self, len + 1);
            w.pop_back();
        }
    };
    rec(rec, 0);
    return fam;
}

// R-diagonal cumulant data with nonzero beta_1, beta_2
inline rdiag_model random_rdiag_model(std::mt19937_64& rng, int d, int K) {
    std::vector<std::pair<ctensor, ctensor>> betas;
    for (int k = 1; k <= K; ++k)
        betas.emplace_back(random_tensor(rng, d, 2 * k, false),
                           random_tensor(rng, d, 2 * k, false));
    return rdiag_model(algebra(d), std::move(betas));
}

inline circular_model random_cp_circular(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<int> num(0, 3);
    linear_map e1(d), e2(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            e1.at(i, j) = crational(rational(num(rng), 2));
            e2.at(i, j) = crational(rational(num(rng), 2));
        }
    return circular_model(algebra(d), std::move(e1), std::move(e2));
}

}  // namespace opval::testing
