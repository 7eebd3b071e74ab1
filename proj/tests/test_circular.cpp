#include <catch_amalgamated.hpp>

#include <random>

#include "opval/circular.hpp"
#include "opval/map_family.hpp"
#include "opval/rdiag.hpp"
#include "test_support.hpp"

using namespace opval;
using opval::testing::random_cp_circular;
using opval::testing::random_elem;

namespace {

alg_elem elem2(const rational& a, const rational& b) {
    return alg_elem(std::vector<crational>{crational(a), crational(b)});
}

crational uniform_trace_of(const circular_model& m, const alg_elem& v) {
    return apply_trace(trace_functional::uniform(m.alg), v);
}

}  // namespace

TEST_CASE("builtin two-dimensional model") {
    auto m = make_nofreepolar();
    const alg_elem one = alg_elem::unit(m.alg);
    CHECK(m.eta1.apply(one) == elem2(rational(1, 2), rational(3, 2)));
    CHECK(m.eta2.apply(one) == elem2(rational(1), rational(1)));
    CHECK(m.positivity_certified());
}

TEST_CASE("discretized integration-kernel model") {
    auto m1 = make_dt_discretized(1);
    CHECK(m1.eta1.at(0, 0) == crational(rational(1, 2)));
    CHECK(m1.eta1 == m1.eta2);

    for (int d : {1, 2, 3, 7, 16}) {
        auto m = make_dt_discretized(d);
        CHECK(m.positivity_certified());
        // eta2 is the flip conjugate
        CHECK(m.eta2 == algebra_automorphism::flip(d).conjugate(m.eta1));
        // trace of the first moment is exactly 1/2 at every resolution
        CHECK(uniform_trace_of(m, m.eta1.apply(alg_elem::unit(m.alg))) ==
              crational(rational(1, 2)));
    }
}

TEST_CASE("discretization converges as the resolution doubles") {
    // uniform-trace alternating moments approach the continuum value with
    // O(1/d) differences shrinking at each doubling
    for (int n = 2; n <= 4; ++n) {
        std::vector<double> vals;
        for (int d : {4, 8, 16, 32}) {
            auto m = make_dt_discretized(d);
            std::vector<alg_elem> args(static_cast<size_t>(2 * n), alg_elem::unit(m.alg));
            auto v = alternating_moment(m, alt_pattern::start_a, args);
            vals.push_back(to_double(uniform_trace_of(m, v).re));
        }
        const double d1 = std::abs(vals[1] - vals[0]);
        const double d2 = std::abs(vals[2] - vals[1]);
        const double d3 = std::abs(vals[3] - vals[2]);
        CHECK(d2 < d1);
        CHECK(d3 < d2);
        CHECK(d3 < 0.6 * d2);  // roughly halves once per doubling
    }
}

TEST_CASE("alternating moments of the builtin model") {
    auto m = make_nofreepolar();
    const alg_elem one = alg_elem::unit(m.alg);
    CHECK(alternating_moment(m, alt_pattern::start_a, {}) == one);
    std::vector<alg_elem> a2(2, one);
    CHECK(alternating_moment(m, alt_pattern::start_a, a2) == elem2(rational(1, 2), rational(3, 2)));
    CHECK(alternating_moment(m, alt_pattern::start_astar, a2) == elem2(rational(1), rational(1)));
    std::vector<alg_elem> a4(4, one);
    CHECK(alternating_moment(m, alt_pattern::start_a, a4) ==
          elem2(rational(3, 4), rational(15, 4)));
    std::vector<alg_elem> odd(3, one);
    CHECK_THROWS_AS(alternating_moment(m, alt_pattern::start_a, odd), std::invalid_argument);
}

TEST_CASE("scalar circular moments are Catalan numbers") {
    auto m = make_scalar_circular(crational(1));
    for (int n = 0; n <= 6; ++n) {
        std::vector<alg_elem> args(static_cast<size_t>(2 * n), alg_elem::unit(m.alg));
        auto v = alternating_moment(m, alt_pattern::start_a, args);
        CHECK(v[0] == crational(rational(static_cast<long long>(catalan(n)))));
    }
}

TEST_CASE("alternating moments agree with the noncrossing machinery") {
    std::mt19937_64 rng(41);
    auto m = make_nofreepolar();
    auto cfam = induced_cumulant_family(m, 8);
    auto mom = moment_family_from_cumulants(cfam, 8);
    const int d = m.alg.dimension;
    for (int n = 1; n <= 4; ++n) {
        for (int first = 0; first < 2; ++first) {
            word j = alternating_word(first, 2 * n);
            // exhaustive basis tuples on the moment-map arguments
            std::vector<int> k(static_cast<size_t>(2 * n - 1), 0);
            while (true) {
                std::vector<alg_elem> margs;
                for (int v : k) margs.push_back(alg_elem::basis(m.alg, v));
                std::vector<alg_elem> aargs = margs;
                aargs.push_back(alg_elem::unit(m.alg));  // trailing coefficient 1
                alg_elem lhs = alternating_moment(
                    m, first == 0 ? alt_pattern::start_a : alt_pattern::start_astar, aargs);
                alg_elem rhs = mom.map_tensor(j).apply(margs);
                CHECK(lhs == rhs);
                int i = 2 * n - 2;
                for (; i >= 0; --i) {
                    if (++k[static_cast<size_t>(i)] < d) break;
                    k[static_cast<size_t>(i)] = 0;
                }
                if (i < 0) break;
            }
        }
    }
    // with random coefficients including the trailing slot, against the
    // literal noncrossing sum
    for (int n = 1; n <= 3; ++n) {
        std::vector<alg_elem> args;
        for (int i = 0; i < 2 * n; ++i) args.push_back(random_elem(rng, 2));
        std::vector<alg_elem> margs(args.begin(), args.end() - 1);
        alg_elem expected = moments_from_cumulants(cfam, alternating_word(0, 2 * n), margs) *
                            args.back();
        CHECK(alternating_moment(m, alt_pattern::start_a, args) == expected);
    }
}

TEST_CASE("semicircular decomposition") {
    // symmetric case: identity covariances
    circular_model sym(algebra(2), linear_map::identity(2), linear_map::identity(2));
    auto dec = semicircular_covariance(sym);
    CHECK(dec.g11 == crational(rational(1, 2)) * linear_map::identity(2));
    CHECK(dec.g12 == linear_map(2));
    CHECK(dec.block_covariance_cp);

    auto m = make_nofreepolar();
    auto dn = semicircular_covariance(m);
    linear_map expected(2);
    expected.at(0, 1) = crational(rational(0), rational(-1, 8));
    expected.at(1, 0) = crational(rational(0), rational(1, 8));
    CHECK(dn.g12 == expected);
    CHECK(dn.block_covariance_cp);

    std::mt19937_64 rng(42);
    for (int rep = 0; rep < 8; ++rep) {
        auto rm = random_cp_circular(rng, 2);
        auto rd = semicircular_covariance(rm);
        CHECK(rd.g11 == rd.g22);
        CHECK(rd.block_covariance_cp);  // both covariances entrywise nonnegative
    }
}

TEST_CASE("semicircular covariances reconstruct the original cumulants") {
    // a = x1 + i x2 and a* = x1 - i x2 turn the gamma family back into the
    // covariance pair by multilinearity
    std::mt19937_64 rng(43);
    for (int rep = 0; rep < 6; ++rep) {
        auto m = random_cp_circular(rng, 3);
        auto dec = semicircular_covariance(m);
        const crational two(2), itwo(rational(0), rational(2));
        linear_map a12 = two * dec.g11 - itwo * dec.g12;
        linear_map a21 = two * dec.g11 + itwo * dec.g12;
        CHECK(a12 == m.eta1);
        CHECK(a21 == m.eta2);
    }
}

TEST_CASE("trace compatibility of circular models") {
    auto m = make_nofreepolar();
    CHECK(check_circular_trace(m, trace_functional::uniform(m.alg)));
    CHECK_FALSE(check_circular_trace(m, trace_functional({rational(1), rational(0)})));

    // symmetric covariance matrix with the uniform trace
    linear_map s(2);
    s.at(0, 0) = crational(1);
    s.at(0, 1) = crational(rational(1, 3));
    s.at(1, 0) = crational(rational(1, 3));
    s.at(1, 1) = crational(rational(1, 2));
    circular_model ms(algebra(2), s, s);
    CHECK(check_circular_trace(ms, trace_functional::uniform(ms.alg)));
}

TEST_CASE("circular trace check is consistent with the cumulant trace condition") {
    auto m = make_nofreepolar();
    trace_functional tau = trace_functional::uniform(m.alg);
    CHECK(check_circular_trace(m, tau));
    CHECK(check_trace_condition(induced_cumulant_family(m, 6), tau, 6).ok);
}

TEST_CASE("induced cumulant family") {
    auto m = make_nofreepolar();
    auto fam = induced_cumulant_family(m, 6);
    CHECK(fam.map_tensor({0, 1}) == ctensor::from_linear_map(m.eta1));
    CHECK(fam.map_tensor({1, 0}) == ctensor::from_linear_map(m.eta2));
    CHECK(fam.map_tensor({0, 0}).is_zero());
    CHECK(fam.map_tensor({0, 1, 0, 1}).is_zero());
    CHECK(check_rdiag_cumulants(fam, 3).ok);
    CHECK_THROWS_AS(induced_cumulant_family(m, 1), std::invalid_argument);
}
