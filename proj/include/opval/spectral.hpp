#pragma once

// The spectral pipeline: exact component series and their quartic identity,
// the algebraic curve of the Stieltjes transform, numeric branch tracking,
// density by Stieltjes inversion, discriminant analysis, operator norm, atom
// estimates and the small-w branch asymptotics.
//
// Exactness boundary: everything through the curve, its discriminant and the
// fractional-power expansion coefficients is rational arithmetic; floating
// point starts at the quartic root solver.
//
// Branch tracking: the tracked branch is seeded by the 1/w asymptote high on
// the imaginary axis and continued by a predictor (implicit-function
// derivative) with a Heun consistency test. A step is accepted only when the
// prediction error is small relative to the actual motion AND the motion is
// small relative to the separation from the other three roots; otherwise the
// step is bisected. Matching the nearest root alone is not sufficient: near
// w ~ i/2 the tracked branch crosses the value range of the small branch,
// and close to the real axis an isolated wrong root can sit next to a flat
// prediction while the true branch runs away.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "opval/ratpoly.hpp"
#include "opval/rational.hpp"

namespace opval {

using cd = std::complex<double>;

struct appendix_series_set {
    std::vector<rational> f1, f2, g1, g2, h;  // coefficient k multiplies z^k
};

namespace detail {

inline std::vector<rational> series_mul(const std::vector<rational>& a,
                                        const std::vector<rational>& b, int N) {
    std::vector<rational> c(static_cast<size_t>(N) + 1, rational(0));
    for (int i = 0; i <= N; ++i) {
        if (i >= static_cast<int>(a.size()) || a[static_cast<size_t>(i)] == 0) continue;
        for (int j = 0; i + j <= N; ++j) {
            if (j >= static_cast<int>(b.size())) break;
            c[static_cast<size_t>(i + j)] += a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
        }
    }
    return c;
}

inline std::vector<rational> series_recip(const std::vector<rational>& a, int N) {
    if (a.empty() || a[0] == 0) throw std::domain_error("series has no reciprocal");
    std::vector<rational> r(static_cast<size_t>(N) + 1, rational(0));
    r[0] = 1 / a[0];
    for (int n = 1; n <= N; ++n) {
        rational acc(0);
        for (int k = 1; k <= n; ++k) {
            if (k < static_cast<int>(a.size()))
                acc += a[static_cast<size_t>(k)] * r[static_cast<size_t>(n - k)];
        }
        r[static_cast<size_t>(n)] = -acc / a[0];
    }
    return r;
}

}  // namespace detail

// the four coupled component recursions
//   f1 = 1 + z (g1/2) f1
//   f2 = 1 + z (g1/2 + g2) f2
//   g1 = 1 + z ((f1+f2)/2) g1
//   g2 = 1 + z f2 g2
// solved degree by degree, with h = (f1+f2)/2
inline appendix_series_set appendix_component_series(int N) {
    if (N < 0) throw std::invalid_argument("negative order");
    const rational half(1, 2);
    appendix_series_set s;
    auto init = [N](std::vector<rational>& v) {
        v.assign(static_cast<size_t>(N) + 1, rational(0));
        v[0] = 1;
    };
    init(s.f1);
    init(s.f2);
    init(s.g1);
    init(s.g2);
    for (int n = 1; n <= N; ++n) {
        rational f1(0), f2(0), g1(0), g2(0);
        for (int i = 0; i + 1 <= n; ++i) {
            const int j = n - 1 - i;
            f1 += half * s.g1[static_cast<size_t>(i)] * s.f1[static_cast<size_t>(j)];
            f2 += (half * s.g1[static_cast<size_t>(i)] + s.g2[static_cast<size_t>(i)]) *
                  s.f2[static_cast<size_t>(j)];
            g1 += half * (s.f1[static_cast<size_t>(i)] + s.f2[static_cast<size_t>(i)]) *
                  s.g1[static_cast<size_t>(j)];
            g2 += s.f2[static_cast<size_t>(i)] * s.g2[static_cast<size_t>(j)];
        }
        s.f1[static_cast<size_t>(n)] = f1;
        s.f2[static_cast<size_t>(n)] = f2;
        s.g1[static_cast<size_t>(n)] = g1;
        s.g2[static_cast<size_t>(n)] = g2;
    }
    s.h.assign(static_cast<size_t>(N) + 1, rational(0));
    for (int n = 0; n <= N; ++n)
        s.h[static_cast<size_t>(n)] =
            half * (s.f1[static_cast<size_t>(n)] + s.f2[static_cast<size_t>(n)]);
    return s;
}

// quartic identity for h, variables (h, z):
// 8 z^3 h^4 - 20 z^2 h^3 + 8 z (z+2) h^2 + (z^2 - 12 z - 4) h + 4 = 0
inline const mpoly& h_quartic_poly() {
    static const mpoly p = [] {
        mpoly q(2);
        q.add_term({4, 3}, rational(8));
        q.add_term({3, 2}, rational(-20));
        q.add_term({2, 2}, rational(8));
        q.add_term({2, 1}, rational(16));
        q.add_term({1, 2}, rational(1));
        q.add_term({1, 1}, rational(-12));
        q.add_term({1, 0}, rational(-4));
        q.add_term({0, 0}, rational(4));
        return q;
    }();
    return p;
}

// substitutes a truncated series for the first variable of a two-variable
// polynomial (second variable is the series variable); returns the residual
// series coefficients 0..N
inline std::vector<rational> eval_series_in_first(const mpoly& p,
                                                  const std::vector<rational>& s, int N) {
    if (p.nvars() != 2) throw std::invalid_argument("needs two variables");
    std::vector<rational> acc(static_cast<size_t>(N) + 1, rational(0));
    // cache powers of s
    std::vector<std::vector<rational>> pow{{rational(1)}};
    for (const auto& [e, c] : p.terms()) {
        const int i = e[0], j = e[1];
        while (static_cast<int>(pow.size()) <= i)
            pow.push_back(detail::series_mul(pow.back(), s, N));
        const auto& si = pow[static_cast<size_t>(i)];
        for (int k = 0; k + j <= N; ++k) {
            if (k >= static_cast<int>(si.size())) break;
            acc[static_cast<size_t>(k + j)] += c * si[static_cast<size_t>(k)];
        }
    }
    return acc;
}

// substituting the truncated h into the quartic identity must leave residual
// coefficients that vanish identically through z^N
inline bool verify_h_quartic(int N) {
    auto s = appendix_component_series(N);
    auto res = eval_series_in_first(h_quartic_poly(), s.h, N);
    return std::all_of(res.begin(), res.end(), [](const rational& r) { return r == 0; });
}

// curve of G(w) = w^{-1} h(w^{-1}): each term c h^i z^j maps to c G^i w^{i-j},
// cleared by the minimal power of w and sign-normalized; variables (G, w)
inline mpoly h_to_g_curve() {
    const mpoly& hq = h_quartic_poly();
    int mn = 0;
    for (const auto& [e, c] : hq.terms()) mn = std::min(mn, e[0] - e[1]);
    mpoly out(2);
    for (const auto& [e, c] : hq.terms()) out.add_term({e[0], e[0] - e[1] - mn}, c);
    // sign normalization: highest (G, w) term positive
    if (!out.terms().empty() && out.terms().rbegin()->second < 0) out = rational(-1) * out;
    return out;
}

namespace detail {

struct g_curve_cache {
    std::array<upoly, 5> coeff;    // coeff[k] multiplies G^k
    std::array<upoly, 5> dcoeff;   // w-derivatives
};

inline const g_curve_cache& curve_cache() {
    static const g_curve_cache c = [] {
        g_curve_cache r;
        const mpoly curve = h_to_g_curve();
        for (int k = 0; k <= 4; ++k) {
            r.coeff[static_cast<size_t>(k)] = curve.coeff_in_as_upoly(0, k);
            r.dcoeff[static_cast<size_t>(k)] = r.coeff[static_cast<size_t>(k)].derivative();
        }
        return r;
    }();
    return c;
}

inline std::array<cd, 5> curve_coeffs_at(const cd& w) {
    const auto& c = curve_cache();
    std::array<cd, 5> out;
    for (int k = 0; k <= 4; ++k) out[static_cast<size_t>(k)] = c.coeff[static_cast<size_t>(k)].eval(w);
    return out;
}

inline cd poly_eval(const std::array<cd, 5>& c, const cd& g) {
    cd acc = c[4];
    for (int k = 3; k >= 0; --k) acc = acc * g + c[static_cast<size_t>(k)];
    return acc;
}

inline cd poly_deriv_g(const std::array<cd, 5>& c, const cd& g) {
    cd acc = 4.0 * c[4];
    for (int k = 3; k >= 1; --k) acc = acc * g + static_cast<double>(k) * c[static_cast<size_t>(k)];
    return acc;
}

inline cd poly_deriv_w(const cd& w, const cd& g) {
    const auto& c = curve_cache();
    cd acc = c.dcoeff[4].eval(w);
    for (int k = 3; k >= 0; --k) acc = acc * g + c.dcoeff[static_cast<size_t>(k)].eval(w);
    return acc;
}

}  // namespace detail

// all four roots of the curve in G at fixed w, by Durand-Kerner iteration
// with Newton polish; throws on w = 0 (degenerate leading coefficient) or
// when the residual acceptance fails
inline std::array<cd, 4> quartic_roots(const cd& w) {
    auto c = detail::curve_coeffs_at(w);
    if (std::abs(c[4]) == 0.0) throw std::domain_error("leading coefficient vanishes at w = 0");
    std::array<cd, 4> a{c[0] / c[4], c[1] / c[4], c[2] / c[4], c[3] / c[4]};
    auto monic_eval = [&](const cd& g) {
        cd acc = g + a[3];
        acc = acc * g + a[2];
        acc = acc * g + a[1];
        return acc * g + a[0];
    };
    auto residual_ok = [&](const cd& g) {
        double scale = 0;
        const double gm = std::max(1.0, std::abs(g));
        double gp = 1;
        for (int m = 0; m <= 4; ++m) {
            scale += std::abs(c[static_cast<size_t>(m)]) * gp;
            gp *= gm;
        }
        return std::abs(detail::poly_eval(c, g)) <= 1e-9 * scale;
    };

    // Cauchy-bound seed circle; on a rejected attempt retry with the seeds
    // rotated and the small-root magnitude mixed in
    const double cauchy = 1.0 + std::max(std::max(std::abs(a[0]), std::abs(a[1])),
                                         std::max(std::abs(a[2]), std::abs(a[3])));
    const double small = std::pow(std::max(std::abs(a[0]), 1e-300), 0.25);
    std::array<cd, 4> z;
    for (int attempt = 0; attempt < 3; ++attempt) {
        const double phase = 0.3 + 0.7 * attempt;
        for (int k = 0; k < 4; ++k) {
            const double ang = phase + 2.0 * M_PI * k / 4.0;
            double rad = attempt == 2 ? small * std::pow(cauchy / small, k / 3.0) : cauchy;
            z[static_cast<size_t>(k)] = rad * cd(std::cos(ang), std::sin(ang));
        }
        for (int it = 0; it < 700; ++it) {
            double moved = 0;
            for (int k = 0; k < 4; ++k) {
                cd num = monic_eval(z[static_cast<size_t>(k)]);
                cd den(1.0, 0.0);
                for (int m = 0; m < 4; ++m)
                    if (m != k) den *= (z[static_cast<size_t>(k)] - z[static_cast<size_t>(m)]);
                if (std::abs(den) == 0.0) den = cd(1e-30, 0);
                cd step = num / den;
                z[static_cast<size_t>(k)] -= step;
                moved = std::max(moved,
                                 std::abs(step) / (1.0 + std::abs(z[static_cast<size_t>(k)])));
            }
            if (moved < 1e-15) break;
        }
        // Newton polish on the original coefficients
        for (int k = 0; k < 4; ++k) {
            for (int it = 0; it < 8; ++it) {
                cd p = detail::poly_eval(c, z[static_cast<size_t>(k)]);
                cd dp = detail::poly_deriv_g(c, z[static_cast<size_t>(k)]);
                if (std::abs(dp) == 0.0) break;
                const cd step = p / dp;
                z[static_cast<size_t>(k)] -= step;
                if (std::abs(step) < 1e-16 * (1.0 + std::abs(z[static_cast<size_t>(k)]))) break;
            }
        }
        bool ok = true;
        for (int k = 0; k < 4; ++k) ok = ok && residual_ok(z[static_cast<size_t>(k)]);
        if (ok) return z;
    }
    throw std::runtime_error("quartic root residual rejected at w = (" +
                             std::to_string(w.real()) + ", " + std::to_string(w.imag()) + ")");
}

struct branch_error : std::runtime_error {
    explicit branch_error(const std::string& what) : std::runtime_error(what) {}
};

struct tracker_config {
    double pred_tol = 0.3;       // prediction error vs motion
    double heun_tol = 0.15;      // Heun consistency vs motion
    double sep_move = 0.4;       // motion vs root separation
    double sep_heun = 0.1;       // Heun consistency vs root separation
    double collision_tol = 1e-8; // minimal tolerated root separation (relative)
    int max_stack = 4000;
    long max_steps = 20'000'000;
};

class stieltjes_tracker {
  public:
    explicit stieltjes_tracker(tracker_config cfg = {}) : cfg_(cfg) {
        w_ = cd(0.0, 1e6);
        auto roots = quartic_roots(w_);
        cd tgt = 1.0 / w_;
        g_ = roots[0];
        for (const auto& r : roots)
            if (std::abs(r - tgt) < std::abs(g_ - tgt)) g_ = r;
    }

    const cd& w() const { return w_; }
    const cd& value() const { return g_; }
    long steps() const { return steps_; }
    double max_jump() const { return max_jump_; }

    // continue the tracked branch along the straight segment to target
    cd advance(const cd& target) {
        std::vector<cd> stack{target};
        while (!stack.empty()) {
            const cd wn = stack.back();
            if (++steps_ > cfg_.max_steps) throw branch_error("step budget exhausted");
            bool ok = false;
            cd chosen;
            double sep = 0, mv = 0;
            const cd dw = wn - w_;
            cd d0;
            if (implicit_deriv(w_, g_, &d0)) {
                const cd gp = g_ + dw * d0;
                auto roots = quartic_roots(wn);
                size_t best = 0;
                for (size_t k = 1; k < 4; ++k)
                    if (std::abs(roots[k] - gp) < std::abs(roots[best] - gp)) best = k;
                chosen = roots[best];
                sep = 1e300;
                for (size_t k = 0; k < 4; ++k)
                    if (k != best) sep = std::min(sep, std::abs(roots[k] - chosen));
                cd d1;
                if (implicit_deriv(wn, chosen, &d1) &&
                    sep > cfg_.collision_tol * (1.0 + std::abs(chosen))) {
                    const cd gheun = g_ + 0.5 * dw * (d0 + d1);
                    mv = std::abs(chosen - g_);
                    const double scale = mv + 1e-13 * (1.0 + std::abs(chosen));
                    ok = std::abs(chosen - gp) <= cfg_.pred_tol * scale &&
                         std::abs(chosen - gheun) <= cfg_.heun_tol * scale &&
                         mv <= cfg_.sep_move * sep &&
                         std::abs(chosen - gheun) <= cfg_.sep_heun * sep;
                }
            }
            if (ok) {
                w_ = wn;
                g_ = chosen;
                max_jump_ = std::max(max_jump_, mv);
                stack.pop_back();
            } else {
                const cd mid = 0.5 * (w_ + wn);
                if (mid == w_ || mid == wn || static_cast<int>(stack.size()) > cfg_.max_stack)
                    throw branch_error("branch collision: refinement stalled near w = (" +
                                       std::to_string(wn.real()) + ", " +
                                       std::to_string(wn.imag()) + ")");
                stack.push_back(mid);
            }
        }
        return g_;
    }

  private:
    static bool implicit_deriv(const cd& w, const cd& g, cd* out) {
        auto c = detail::curve_coeffs_at(w);
        cd pg = detail::poly_deriv_g(c, g);
        if (std::abs(pg) < 1e-300) return false;
        *out = -detail::poly_deriv_w(w, g) / pg;
        return true;
    }

    tracker_config cfg_;
    cd w_;
    cd g_;
    long steps_ = 0;
    double max_jump_ = 0;
};

// one-shot evaluation of the tracked branch; valid for Im w > 0 and for real
// w outside the support (the branch extends continuously from above)
inline cd stieltjes_g(const cd& w) {
    stieltjes_tracker tr;
    return tr.advance(w);
}

// exact fractional-power expansion at w -> 0 of the tracked branch:
// G = W^{-2} S(W) with w = W^3 and S a power series; computes S's
// coefficients by series Newton iteration on the transformed curve
inline std::vector<rational> puiseux_s_coeffs(int N) {
    // transform each curve term c G^i w^j to c S^i W^{3j - 2i + shift}
    const mpoly curve = h_to_g_curve();
    int mn = 0;
    for (const auto& [e, c] : curve.terms()) mn = std::min(mn, 3 * e[1] - 2 * e[0]);
    mpoly phi(2);  // variables (S, W)
    for (const auto& [e, c] : curve.terms()) phi.add_term({e[0], 3 * e[1] - 2 * e[0] - mn}, c);
    const mpoly phi_s = phi.derivative_in(0);

    std::vector<rational> s(static_cast<size_t>(N) + 1, rational(0));
    s[0] = rational(-1, 2);
    for (int it = 0; it < 2 * N + 4; ++it) {
        auto num = eval_series_in_first(phi, s, N);
        if (std::all_of(num.begin(), num.end(), [](const rational& r) { return r == 0; })) break;
        auto den = eval_series_in_first(phi_s, s, N);
        auto upd = detail::series_mul(num, detail::series_recip(den, N), N);
        for (int k = 0; k <= N; ++k) s[static_cast<size_t>(k)] -= upd[static_cast<size_t>(k)];
    }
    auto res = eval_series_in_first(phi, s, N);
    for (const auto& r : res)
        if (r != 0) throw std::runtime_error("fractional expansion did not converge");
    return s;
}

// the two competing small-w behaviors: the rational branch and the tracked
// branch's three-term fractional expansion (negative-real cube root for
// negative real w)
inline cd g1_expansion(double w) { return cd(-4.0 * w - 48.0 * w * w, 0.0); }

inline cd g2_expansion_3term(double w) {
    if (w >= 0) throw std::invalid_argument("expansion is for negative real w");
    const double W = -std::cbrt(-w);
    static const std::array<double, 3> a = [] {
        auto s = puiseux_s_coeffs(2);
        return std::array<double, 3>{to_double(s[0]), to_double(s[1]), to_double(s[2])};
    }();
    return cd((a[0] / W + a[1]) / W + a[2], 0.0);
}

struct density_samples {
    std::vector<double> t;
    std::vector<double> rho;
    double eps = 0;
    bool richardson = true;
    double t_min = 0, t_max = 0;
    double min_before_clamp = 0;  // most negative raw value seen
};

// rho(t) = -Im G(t + i eps) / pi on an ascending grid, optionally with
// two-point Richardson extrapolation (eps and eps/2) removing the O(eps)
// smoothing bias; negatives beyond -1e-9 indicate tracking trouble and are
// reported via min_before_clamp, tiny ones are clamped to 0
inline density_samples density(const std::vector<double>& grid, double eps,
                               bool richardson = true, int threads = 1) {
    if (grid.empty()) throw std::invalid_argument("empty grid");
    if (!(eps > 0) || eps > 1e-3) throw std::invalid_argument("eps out of (0, 1e-3]");
    for (size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] <= 0) throw std::invalid_argument("grid must lie in (0, t_max]");
        if (i && grid[i] <= grid[i - 1])
            throw std::invalid_argument("grid must be strictly increasing");
    }
    density_samples out;
    out.t = grid;
    out.rho.assign(grid.size(), 0.0);
    out.eps = eps;
    out.richardson = richardson;
    out.t_min = grid.front();
    out.t_max = grid.back();

    const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
    std::vector<double> min_raw(static_cast<size_t>(nthreads), 0.0);
    auto run_chunk = [&](size_t lo, size_t hi, int tid) {
        // independently seeded segment: each chunk descends from the seed to
        // its first grid point, then walks right at constant height
        stieltjes_tracker tr1;
        tr1.advance(cd(grid[lo], eps));
        std::optional<stieltjes_tracker> tr2;
        if (richardson) {
            tr2.emplace();
            tr2->advance(cd(grid[lo], eps / 2));
        }
        for (size_t i = lo; i < hi; ++i) {
            cd g1v = tr1.advance(cd(grid[i], eps));
            double r = -g1v.imag() / M_PI;
            if (richardson) {
                cd g2v = tr2->advance(cd(grid[i], eps / 2));
                r = 2.0 * (-g2v.imag() / M_PI) - r;
            }
            min_raw[static_cast<size_t>(tid)] = std::min(min_raw[static_cast<size_t>(tid)], r);
            out.rho[i] = std::max(r, 0.0);
        }
    };
    if (nthreads == 1) {
        run_chunk(0, grid.size(), 0);
    } else {
        std::vector<std::thread> pool;
        const size_t per = (grid.size() + static_cast<size_t>(nthreads) - 1) /
                           static_cast<size_t>(nthreads);
        for (int t = 0; t < nthreads; ++t) {
            const size_t lo = static_cast<size_t>(t) * per;
            const size_t hi = std::min(grid.size(), lo + per);
            if (lo >= hi) break;
            pool.emplace_back(run_chunk, lo, hi, t);
        }
        for (auto& th : pool) th.join();
    }
    out.min_before_clamp = *std::min_element(min_raw.begin(), min_raw.end());
    return out;
}

// composite grid: geometric through the small-t power region, uniform bulk,
// refined near the upper support edge
inline std::vector<double> default_density_grid(int points, double t_lo = 1e-4,
                                                double t_hi = 4.8) {
    if (points < 10) throw std::invalid_argument("too few grid points");
    const double mid1 = 0.06, mid2 = 4.7;
    const int n1 = points * 3 / 10, n3 = points / 5, n2 = points - n1 - n3;
    std::vector<double> g;
    g.reserve(static_cast<size_t>(points));
    for (int i = 0; i < n1; ++i)
        g.push_back(t_lo * std::pow(mid1 / t_lo, static_cast<double>(i) / n1));
    for (int i = 0; i < n2; ++i)
        g.push_back(mid1 + (mid2 - mid1) * static_cast<double>(i) / n2);
    for (int i = 0; i <= n3 - 1; ++i)
        g.push_back(mid2 + (t_hi - mid2) * static_cast<double>(i + 1) / n3);
    return g;
}

struct measure_stats {
    double mass = 0;
    double m1 = 0;
    double m2 = 0;
    double m3 = 0;
};

// integrates the sampled density by the trapezoid rule, splicing the exact
// t^{-2/3} power expansion over (0, t_min] where naive quadrature fails
inline measure_stats estimate_measure_stats(const density_samples& s) {
    static const std::array<double, 5> a = [] {
        auto c = puiseux_s_coeffs(4);
        return std::array<double, 5>{to_double(c[0]), to_double(c[1]), to_double(c[2]),
                                     to_double(c[3]), to_double(c[4])};
    }();
    const double s32 = std::sqrt(3.0) / (2.0 * M_PI);
    const double t0 = s.t_min;
    auto p = [&](double e) { return std::pow(t0, e); };
    measure_stats r;
    // rho ~ s32 (-a0 t^{-2/3} + a1 t^{-1/3} - a3 t^{1/3} + a4 t^{2/3})
    r.mass = s32 * (-a[0] * 3 * p(1.0 / 3) + a[1] * 1.5 * p(2.0 / 3) - a[3] * 0.75 * p(4.0 / 3) +
                    a[4] * 0.6 * p(5.0 / 3));
    r.m1 = s32 * (-a[0] * 0.75 * p(4.0 / 3) + a[1] * 0.6 * p(5.0 / 3));
    r.m2 = s32 * (-a[0] * (3.0 / 7) * p(7.0 / 3));
    r.m3 = s32 * (-a[0] * 0.3 * p(10.0 / 3));
    for (size_t i = 0; i + 1 < s.t.size(); ++i) {
        const double dt = s.t[i + 1] - s.t[i];
        auto seg = [&](double f0, double f1) { return 0.5 * (f0 + f1) * dt; };
        const double t0i = s.t[i], t1i = s.t[i + 1];
        const double r0 = s.rho[i], r1 = s.rho[i + 1];
        r.mass += seg(r0, r1);
        r.m1 += seg(r0 * t0i, r1 * t1i);
        r.m2 += seg(r0 * t0i * t0i, r1 * t1i * t1i);
        r.m3 += seg(r0 * t0i * t0i * t0i, r1 * t1i * t1i * t1i);
    }
    return r;
}

struct atom_estimate {
    double estimate = 0;              // extrapolated limit of eps * |G(t0 + i eps)|
    std::vector<double> raw;          // eps_k * |G(t0 + i eps_k)|
};

// atom mass at t0 from a decreasing eps sequence; with three or more points
// the geometric decay of the no-atom case is removed by Aitken extrapolation
inline atom_estimate atom_mass(double t0, const std::vector<double>& eps_seq) {
    if (eps_seq.empty()) throw std::invalid_argument("empty eps sequence");
    atom_estimate out;
    stieltjes_tracker tr;
    tr.advance(cd(t0, eps_seq.front()));
    for (double e : eps_seq) {
        cd g = tr.advance(cd(t0, e));
        out.raw.push_back(e * std::abs(g));
    }
    const size_t n = out.raw.size();
    if (n >= 3) {
        const double v0 = out.raw[n - 3], v1 = out.raw[n - 2], v2 = out.raw[n - 1];
        const double den = v0 - 2 * v1 + v2;
        out.estimate = (std::abs(den) > 1e-300) ? std::abs((v0 * v2 - v1 * v1) / den) : v2;
    } else {
        out.estimate = out.raw.back();
    }
    return out;
}

struct puiseux_point {
    double w = 0;
    cd g;
    double err_ratio = 0;   // |G - 3-term expansion| / |w|^{1/3}
    double g1_rel_gap = 0;  // |G - rational-branch expansion| / |expansion|
};

struct puiseux_report {
    std::vector<puiseux_point> points;
    double fit_exponent = 0;  // slope of log|G - expansion| vs log|w|
};

// confirms the tracked branch follows the fractional expansion (error ratio
// bounded; fit exponent near 1/3) and stays far from the rational branch
inline puiseux_report check_puiseux(const std::vector<double>& wgrid) {
    puiseux_report rep;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double w : wgrid) {
        if (w >= 0) throw std::invalid_argument("grid must be negative real");
        puiseux_point p;
        p.w = w;
        p.g = stieltjes_g(cd(w, 0.0));
        const cd e2 = g2_expansion_3term(w);
        const double err = std::abs(p.g - e2);
        p.err_ratio = err / std::cbrt(-w);
        const cd e1 = g1_expansion(w);
        p.g1_rel_gap = std::abs(p.g - e1) / std::abs(e1);
        rep.points.push_back(p);
        if (err > 0) {
            const double lx = std::log(-w), ly = std::log(err);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
        }
    }
    if (n >= 2) rep.fit_exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

struct discriminant_result {
    upoly resultant_in_w;   // Res_G(P, dP/dG), exact
    upoly discriminant;     // resultant / leading coefficient
    upoly quartic_factor;   // discriminant / (-64 w^4)
    bool matches_reference = false;
    std::vector<double> real_roots;  // of the quartic factor
};

inline const upoly& reference_disc_quartic() {
    static const upoly q(std::vector<rational>{rational(27), rational(-680), rational(540),
                                               rational(-160), rational(16)});
    return q;
}

inline discriminant_result discriminant_roots() {
    discriminant_result out;
    const mpoly curve = h_to_g_curve();
    mpoly res = resultant(curve, curve.derivative_in(0), 0);
    out.resultant_in_w = res.coeff_in_as_upoly(0, 0);
    // discriminant = resultant / leading coefficient 8 w^2
    out.discriminant = out.resultant_in_w.divexact_monomial(rational(8), 2);
    out.quartic_factor = out.discriminant.divexact_monomial(rational(-64), 4);
    out.matches_reference = upoly::proportional(out.quartic_factor, reference_disc_quartic());

    // real roots of the quartic factor, Durand-Kerner then Newton on the real line
    const upoly& q = out.quartic_factor;
    std::array<cd, 4> z{cd(0.5, 0.5), cd(-0.6, 0.8), cd(2.0, -0.7), cd(4.0, 0.3)};
    auto ev = [&](cd x) { return q.eval(x); };
    for (int it = 0; it < 500; ++it) {
        double moved = 0;
        for (int k = 0; k < 4; ++k) {
            cd den = q.leading() == 0 ? cd(1, 0) : cd(to_double(q.leading()), 0);
            for (int m = 0; m < 4; ++m)
                if (m != k) den *= (z[static_cast<size_t>(k)] - z[static_cast<size_t>(m)]);
            cd step = ev(z[static_cast<size_t>(k)]) / den;
            z[static_cast<size_t>(k)] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-14) break;
    }
    const upoly dq = q.derivative();
    for (const auto& root : z) {
        if (std::abs(root.imag()) < 1e-8 * (1.0 + std::abs(root.real()))) {
            double x = root.real();
            for (int it = 0; it < 6; ++it) {
                const double d = dq.eval(x);
                if (d == 0) break;
                x -= q.eval(x) / d;
            }
            out.real_roots.push_back(x);
        }
    }
    std::sort(out.real_roots.begin(), out.real_roots.end());
    return out;
}

// degree-8 polynomial in x with x^2 substituted for w in the quartic factor
inline upoly norm_octic() {
    const upoly q = discriminant_roots().quartic_factor;
    std::vector<rational> c(static_cast<size_t>(2 * q.degree()) + 1, rational(0));
    for (int k = 0; k <= q.degree(); ++k) c[static_cast<size_t>(2 * k)] = q.coeff(k);
    return upoly(std::move(c));
}

// operator norm: square root of the largest real root of the quartic factor
inline double operator_norm() {
    auto d = discriminant_roots();
    if (d.real_roots.empty()) throw std::runtime_error("no real discriminant roots");
    return std::sqrt(d.real_roots.back());
}

struct elimination_result {
    mpoly eliminant;          // primitive part, variables (h, z)
    mpoly retained;           // the quartic identity factor found inside
    mpoly extraneous;         // cofactor after stripping it
    int multiplicity = 0;     // how many times the identity factor divides
    bool extraneous_annihilates_h = false;  // residual test on the cofactor
};

// eliminates the four component series from the defining system by
// successive resultants, then strips the quartic identity factor; the
// cofactor is rejected by the series residual, certifying the identity as
// the factor that annihilates h
inline elimination_result eliminate_h() {
    // variables: 0 z, 1 h, 2 f1, 3 f2, 4 g1, 5 g2
    const int NV = 6;
    auto V = [&](int v) { return mpoly::var(NV, v); };
    auto C = [&](const rational& r) { return mpoly::constant(NV, r); };
    const rational half(1, 2);
    mpoly e1 = V(2) - C(1) - half * (V(0) * V(4) * V(2));
    mpoly e2 = V(3) - C(1) - V(0) * (half * V(4) + V(5)) * V(3);
    mpoly e3 = V(4) - C(1) - half * (V(0) * (V(2) + V(3)) * V(4));
    mpoly e4 = V(5) - C(1) - V(0) * V(3) * V(5);
    mpoly e5 = rational(2) * V(1) - V(2) - V(3);

    mpoly a1 = resultant(e2, e4, 5);   // remove g2; leaves z, f2, g1
    mpoly b1 = resultant(e1, e5, 2);   // remove f1; leaves z, h, f2, g1
    mpoly c1 = resultant(e3, e5, 2);
    mpoly d1 = resultant(b1, a1, 4);   // remove g1; leaves z, h, f2
    mpoly d2 = resultant(c1, a1, 4);
    mpoly r5 = resultant(d1, d2, 3);   // remove f2; leaves z, h

    // compress to variables (h, z)
    mpoly elim(2);
    for (const auto& [e, c] : r5.terms()) {
        for (int v = 2; v < NV; ++v)
            if (e[static_cast<size_t>(v)] != 0)
                throw std::runtime_error("elimination left a component variable");
        elim.add_term({e[1], e[0]}, c);
    }
    elimination_result out{elim.primitive(), h_quartic_poly(), mpoly(2), 0, false};

    const int N = 12;
    const auto comps = appendix_component_series(N);
    auto annihilates = [&](const mpoly& p) {
        auto res = eval_series_in_first(p, comps.h, N);
        return std::all_of(res.begin(), res.end(), [](const rational& r) { return r == 0; });
    };
    if (!annihilates(out.eliminant)) throw std::runtime_error("eliminant misses the series");

    mpoly cur = out.eliminant;
    mpoly q(2);
    while (divide_exact(cur, out.retained, 0, &q)) {
        cur = q;
        ++out.multiplicity;
        if (cur.is_zero() || cur.degree_in(0) < 0) break;
    }
    out.extraneous = cur.primitive();
    out.extraneous_annihilates_h = annihilates(out.extraneous);
    return out;
}

}  // namespace opval
