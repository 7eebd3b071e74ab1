#include <catch_amalgamated.hpp>

#include <random>

#include "opval/series.hpp"
#include "test_support.hpp"

using namespace opval;
using opval::testing::random_elem;
using opval::testing::random_rdiag_model;

namespace {

const std::vector<rational> h_ref{rational(1),        rational(1),        rational(9, 4),
                                  rational(13, 2),    rational(341, 16),  rational(1207, 16),
                                  rational(17985, 64)};

bseries z_plus(const algebra& a, int sign, int N) {
    bseries s = bseries::one(a, N);
    s.coeff(1) = crational(sign) * alg_elem::unit(a);
    return s;
}

}  // namespace

TEST_CASE("series arithmetic") {
    algebra a(2);
    // (1+z)(1-z) = 1 - z^2 at truncation 2
    bseries prod = z_plus(a, 1, 2) * z_plus(a, -1, 2);
    CHECK(prod.coeff(0) == alg_elem::unit(a));
    CHECK(prod.coeff(1).is_zero());
    CHECK(prod.coeff(2) == -alg_elem::unit(a));

    std::mt19937_64 rng(61);
    auto rand_series = [&](int N) {
        bseries s(a, N);
        for (int n = 0; n <= N; ++n) s.coeff(n) = random_elem(rng, 2);
        return s;
    };
    auto x = rand_series(6), y = rand_series(6), z = rand_series(6);
    CHECK(x * bseries::one(a, 6) == x);
    CHECK((x * y) * z == x * (y * z));
    CHECK_THROWS_AS(x * bseries::one(a, 5), std::invalid_argument);
}

TEST_CASE("coupled series of the builtin model reproduce the scalar coefficients") {
    auto m = make_nofreepolar();
    const alg_elem one = alg_elem::unit(m.alg);
    auto fg = solve_fg(m, one, one, 6);
    CHECK(fg.F.coeff(0) == one);
    CHECK(fg.G.coeff(0) == one);
    trace_functional tau = trace_functional::uniform(m.alg);
    for (int n = 0; n <= 6; ++n) {
        CHECK(apply_trace(tau, fg.F.coeff(n)) == crational(h_ref[static_cast<size_t>(n)]));
        CHECK(apply_trace(tau, fg.G.coeff(n)) == crational(h_ref[static_cast<size_t>(n)]));
    }
}

TEST_CASE("series coefficients are the alternating moments") {
    std::mt19937_64 rng(62);
    auto m = make_nofreepolar();
    auto b1 = random_elem(rng, 2), b2 = random_elem(rng, 2);
    auto fg = solve_fg(m, b1, b2, 6);
    for (int n = 0; n <= 6; ++n) {
        std::vector<alg_elem> args;
        for (int i = 0; i < n; ++i) {
            args.push_back(b1);
            args.push_back(b2);
        }
        CHECK(fg.F.coeff(n) == alternating_moment(m, alt_pattern::start_a, args));
        CHECK(fg.G.coeff(n) == alternating_moment(m, alt_pattern::start_astar, args));
    }
}

TEST_CASE("the solved series satisfy their own recursion") {
    // plugging the truncated solution back into the fixed point map changes
    // nothing: coefficients are uniquely determined degree by degree
    std::mt19937_64 rng(63);
    auto m = make_nofreepolar();
    auto b1 = random_elem(rng, 2), b2 = random_elem(rng, 2);
    const int N = 8;
    auto fg12 = solve_fg(m, b1, b2, N);
    auto fg21 = solve_fg(m, b2, b1, N);
    for (int n = 1; n <= N; ++n) {
        alg_elem f(m.alg.dimension), g(m.alg.dimension);
        for (int i = 0; i + 1 <= n; ++i) {
            f += m.eta1.apply(b1 * fg21.G.coeff(i)) * b2 * fg12.F.coeff(n - 1 - i);
            g += m.eta2.apply(b1 * fg21.F.coeff(i)) * b2 * fg12.G.coeff(n - 1 - i);
        }
        CHECK(f == fg12.F.coeff(n));
        CHECK(g == fg12.G.coeff(n));
    }
}

TEST_CASE("general alternating series specialize to the circular one") {
    std::mt19937_64 rng(64);
    auto m = make_nofreepolar();
    auto model = rdiag_model::from_circular(m, 3);  // higher cumulants all zero
    auto b1 = random_elem(rng, 2), b2 = random_elem(rng, 2);
    auto lhs = solve_alternating_series(model, b1, b2, 6);
    auto rhs = solve_fg(m, b1, b2, 6);
    CHECK(lhs.F == rhs.F);
    CHECK(lhs.G == rhs.G);

    // first-order coefficient reads off the recursion
    CHECK(lhs.F.coeff(1) == m.eta1.apply(b1) * b2);
    CHECK(lhs.G.coeff(1) == m.eta2.apply(b1) * b2);
}

TEST_CASE("general alternating series match the noncrossing brute force") {
    std::mt19937_64 rng(65);
    auto model = random_rdiag_model(rng, 2, 2);  // beta_1, beta_2 both nonzero
    auto fam = induced_cumulant_family(model, 10);
    auto b1 = random_elem(rng, 2), b2 = random_elem(rng, 2);
    auto fg = solve_alternating_series(model, b1, b2, 5);
    for (int n = 1; n <= 5; ++n) {
        std::vector<alg_elem> margs;
        for (int i = 0; i + 1 < 2 * n; ++i) margs.push_back(i % 2 == 0 ? b1 : b2);
        alg_elem f = moments_from_cumulants(fam, alternating_word(0, 2 * n), margs) * b2;
        alg_elem g = moments_from_cumulants(fam, alternating_word(1, 2 * n), margs) * b2;
        CHECK(fg.F.coeff(n) == f);
        CHECK(fg.G.coeff(n) == g);
    }
}

TEST_CASE("trace symmetry of the two series for the tracial model") {
    auto m = make_nofreepolar();
    const alg_elem one = alg_elem::unit(m.alg);
    auto fg = solve_fg(m, one, one, 8);
    trace_functional tau = trace_functional::uniform(m.alg);
    for (int n = 0; n <= 8; ++n)
        CHECK(apply_trace(tau, fg.F.coeff(n)) == apply_trace(tau, fg.G.coeff(n)));
}

TEST_CASE("multilinear series composition basics") {
    std::mt19937_64 rng(66);
    algebra a(2);
    const int N = 5;
    // X o I = X for any index assignment
    multiseries X(a, N);
    X.constant_term() = random_elem(rng, 2);
    for (int n = 1; n <= N; ++n) X.set_term(n, testing::random_tensor(rng, 2, n + 1));
    multiseries I = multiseries::identity(a, N);
    const multiseries* psis[2] = {&I, &I};
    auto comp = multi_compose(X, [](int, int j) { return (j + 1) % 2; }, psis);
    CHECK(comp == X);

    // a purely linear X acts termwise: (X o Psi)_n = M o Psi_n
    multiseries lin(a, N);
    linear_map M(2);
    M.at(0, 1) = crational(2);
    M.at(1, 0) = crational(rational(1, 3));
    lin.set_term(1, ctensor::from_linear_map(M));
    multiseries psi(a, N);
    for (int n = 1; n <= N; ++n) psi.set_term(n, testing::random_tensor(rng, 2, n + 1));
    const multiseries* ps[1] = {&psi};
    auto lc = multi_compose(lin, [](int, int) { return 0; }, ps);
    for (int n = 1; n <= N; ++n) {
        // compare on basis tuples
        std::vector<int> k(static_cast<size_t>(n), 0);
        while (true) {
            std::vector<alg_elem> args;
            for (int v : k) args.push_back(alg_elem::basis(a, v));
            CHECK(lc.apply_term(n, args) == M.apply(psi.apply_term(n, args)));
            int i = n - 1;
            for (; i >= 0; --i) {
                if (++k[static_cast<size_t>(i)] < 2) break;
                k[static_cast<size_t>(i)] = 0;
            }
            if (i < 0) break;
        }
    }

    // composition requires vanishing constant terms
    multiseries badpsi = psi;
    badpsi.constant_term() = alg_elem::unit(a);
    const multiseries* bp[1] = {&badpsi};
    CHECK_THROWS_AS(multi_compose(lin, [](int, int) { return 0; }, bp),
                    std::invalid_argument);
}

namespace {

// checks M = 1 + (A of (IM1, IM2)) * M at truncation N for both labels
void check_moment_recursion(const rdiag_model& model, int N) {
    auto fam = induced_cumulant_family(model, N + 2);
    auto mom = moment_family_from_cumulants(fam, N);
    multiseries M1 = moment_multiseries(mom, 0, N);
    multiseries M2 = moment_multiseries(mom, 1, N);
    multiseries I = multiseries::identity(model.alg, N);
    multiseries IM1 = I * M1, IM2 = I * M2;
    multiseries A1 = cumulant_multiseries(model, 0, N);
    multiseries A2 = cumulant_multiseries(model, 1, N);
    const multiseries* psis[2] = {&IM1, &IM2};
    // odd argument slots take the opposite-label series
    auto f = [](int, int j) { return j % 2 == 1 ? 1 : 0; };
    auto g = [](int, int j) { return j % 2 == 1 ? 0 : 1; };
    multiseries rhs1 = multiseries::constant(alg_elem::unit(model.alg), N) +
                       multi_compose(A1, f, psis) * M1;
    multiseries rhs2 = multiseries::constant(alg_elem::unit(model.alg), N) +
                       multi_compose(A2, g, psis) * M2;
    CHECK(rhs1 == M1);
    CHECK(rhs2 == M2);
}

}  // namespace

TEST_CASE("moment series fixed point via multivariate composition") {
    check_moment_recursion(rdiag_model::from_circular(make_nofreepolar(), 1), 8);
    std::mt19937_64 rng(67);
    check_moment_recursion(random_rdiag_model(rng, 2, 2), 6);
}

TEST_CASE("evaluating the composition identity reproduces the coefficient series") {
    std::mt19937_64 rng(68);
    auto m = make_nofreepolar();
    auto fam = induced_cumulant_family(m, 8);
    auto mom = moment_family_from_cumulants(fam, 8);
    multiseries M1 = moment_multiseries(mom, 0, 8);
    auto b1 = random_elem(rng, 2), b2 = random_elem(rng, 2);
    auto fg = solve_fg(m, b1, b2, 4);
    for (int n = 1; n <= 4; ++n) {
        std::vector<alg_elem> v;
        for (int i = 0; i < 2 * n; ++i) v.push_back(i % 2 == 0 ? b1 : b2);
        CHECK(M1.apply_term(2 * n, v) == fg.F.coeff(n));
        CHECK(M1.apply_term(2 * n - 1, std::vector<alg_elem>(v.begin(), v.end() - 1)).is_zero());
    }
}
