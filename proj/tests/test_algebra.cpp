#include <catch_amalgamated.hpp>

#include <random>

#include "opval/algebra.hpp"

using namespace opval;

namespace {

alg_elem elem2(const crational& a, const crational& b) {
    return alg_elem(std::vector<crational>{a, b});
}

alg_elem random_elem(std::mt19937_64& rng, int d) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    std::vector<crational> c;
    for (int i = 0; i < d; ++i)
        c.emplace_back(rational(num(rng), den(rng)), rational(num(rng), den(rng)));
    return alg_elem(std::move(c));
}

}  // namespace

TEST_CASE("coordinatewise arithmetic") {
    CHECK(elem2(1, 2) * elem2(3, 4) == elem2(3, 8));
    CHECK(elem2(crational::i(), 1).star() == elem2(-crational::i(), 1));
    algebra a(2);
    CHECK(alg_elem::unit(a) + alg_elem::zero(a) == alg_elem::unit(a));
    CHECK(elem2(1, 2) * elem2(3, 4) == elem2(3, 4) * elem2(1, 2));
}

TEST_CASE("arithmetic rejects dimension mismatch") {
    alg_elem a(2), b(3);
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(a * b, std::invalid_argument);
    CHECK_THROWS_AS(linear_map(2).apply(b), std::invalid_argument);
}

TEST_CASE("star is an involutive anti-automorphism") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 20; ++rep) {
        auto b = random_elem(rng, 3), c = random_elem(rng, 3);
        CHECK(b.star().star() == b);
        CHECK((b * c).star() == c.star() * b.star());
    }
}

TEST_CASE("trace evaluation") {
    trace_functional tau({rational(1, 2), rational(1, 2)});
    CHECK(apply_trace(tau, elem2(rational(1, 2), rational(3, 2))) == crational(1));
    CHECK(apply_trace(tau, elem2(rational(3, 4), rational(15, 4))) == crational(rational(9, 4)));
    trace_functional point({rational(1), rational(0), rational(0)});
    CHECK(apply_trace(point, alg_elem::unit(algebra(3))) == crational(1));
    CHECK(tau.is_state());
    CHECK_FALSE(trace_functional({rational(2), rational(-1)}).is_state());
    CHECK_THROWS_AS(apply_trace(tau, alg_elem(3)), std::invalid_argument);
}

TEST_CASE("trace is symmetric in products") {
    std::mt19937_64 rng(11);
    trace_functional tau({rational(1, 3), rational(1, 3), rational(1, 3)});
    for (int rep = 0; rep < 10; ++rep) {
        auto b = random_elem(rng, 3), c = random_elem(rng, 3);
        CHECK(apply_trace(tau, b * c) == apply_trace(tau, c * b));
    }
}

TEST_CASE("positive map check") {
    linear_map m(2);
    m.at(0, 0) = crational(rational(1, 2));
    m.at(1, 0) = crational(rational(1, 2));
    m.at(1, 1) = crational(1);
    CHECK(check_positive_map(m));
    CHECK(check_positive_map(linear_map::identity(3)));
    linear_map bad(2);
    bad.at(0, 0) = crational(1);
    bad.at(0, 1) = crational(-1);
    bad.at(1, 1) = crational(1);
    CHECK_FALSE(check_positive_map(bad));
    linear_map cplx(1);
    cplx.at(0, 0) = crational::i();
    CHECK_FALSE(check_positive_map(cplx));
}

TEST_CASE("positivity is closed under composition") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> num(0, 3);
    for (int rep = 0; rep < 10; ++rep) {
        linear_map m(2), n(2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                m.at(i, j) = crational(rational(num(rng), 2));
                n.at(i, j) = crational(rational(num(rng), 2));
            }
        REQUIRE(check_positive_map(m));
        REQUIRE(check_positive_map(n));
        CHECK(check_positive_map(m.compose(n)));
    }
}

TEST_CASE("automorphisms are coordinate permutations") {
    algebra_automorphism th({2, 0, 1});
    algebra a(3);
    CHECK(th.apply(alg_elem::unit(a)) == alg_elem::unit(a));
    std::mt19937_64 rng(5);
    auto b = random_elem(rng, 3);
    CHECK(th.apply(b.star()) == th.apply(b).star());
    CHECK(th.inverse().apply(th.apply(b)) == b);
    CHECK_THROWS_AS(algebra_automorphism({0, 0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(algebra_automorphism({0, 3}), std::invalid_argument);

    // conjugation theta o M o theta acts as expected on a sample
    linear_map m(2);
    m.at(0, 1) = crational(1);
    auto flip = algebra_automorphism::flip(2);
    linear_map c = flip.conjugate(m);
    alg_elem v = elem2(5, 7);
    CHECK(c.apply(v) == flip.apply(m.apply(flip.apply(v))));
}
