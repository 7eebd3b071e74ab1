#pragma once

// Exact rational polynomials: dense univariate, sparse multivariate, and
// resultants via Sylvester determinants (cofactor expansion with subset
// memoization; the matrices here stay small).

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "opval/rational.hpp"

namespace opval {

class upoly {
  public:
    upoly() = default;
    explicit upoly(std::vector<rational> coeffs) : c_(std::move(coeffs)) { trim(); }
    static upoly monomial(const rational& a, int k) {
        std::vector<rational> c(static_cast<size_t>(k) + 1, rational(0));
        c[static_cast<size_t>(k)] = a;
        return upoly(std::move(c));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c_.empty(); }
    const rational& coeff(int k) const {
        static const rational zero(0);
        if (k < 0 || k > degree()) return zero;
        return c_[static_cast<size_t>(k)];
    }
    const std::vector<rational>& coeffs() const { return c_; }
    const rational& leading() const {
        if (c_.empty()) throw std::domain_error("zero polynomial has no leading coefficient");
        return c_.back();
    }

    friend upoly operator+(const upoly& a, const upoly& b) {
        std::vector<rational> c(std::max(a.c_.size(), b.c_.size()), rational(0));
        for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) + b.coeff(static_cast<int>(i));
        return upoly(std::move(c));
    }
    friend upoly operator-(const upoly& a, const upoly& b) {
        std::vector<rational> c(std::max(a.c_.size(), b.c_.size()), rational(0));
        for (size_t i = 0; i < c.size(); ++i) c[i] = a.coeff(static_cast<int>(i)) - b.coeff(static_cast<int>(i));
        return upoly(std::move(c));
    }
    friend upoly operator*(const upoly& a, const upoly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<rational> c(a.c_.size() + b.c_.size() - 1, rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return upoly(std::move(c));
    }
    friend upoly operator*(const rational& s, const upoly& a) {
        if (s == 0) return {};
        upoly r = a;
        for (auto& x : r.c_) x *= s;
        return r;
    }
    friend bool operator==(const upoly&, const upoly&) = default;

    upoly derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<rational> c(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) c[i - 1] = rational(i) * c_[i];
        return upoly(std::move(c));
    }

    rational eval(const rational& x) const {
        rational acc(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        return acc;
    }
    std::complex<double> eval(const std::complex<double>& x) const {
        std::complex<double> acc(0.0, 0.0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + to_double(c_[i]);
        return acc;
    }
    double eval(double x) const {
        double acc = 0;
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + to_double(c_[i]);
        return acc;
    }

    // exact division by s * x^k; throws when not divisible
    upoly divexact_monomial(const rational& s, int k) const {
        if (s == 0) throw std::domain_error("division by zero monomial");
        if (is_zero()) return {};
        if (degree() < k) throw std::domain_error("not divisible by monomial");
        for (int i = 0; i < k; ++i)
            if (coeff(i) != 0) throw std::domain_error("not divisible by monomial");
        std::vector<rational> c(c_.begin() + k, c_.end());
        for (auto& x : c) x /= s;
        return upoly(std::move(c));
    }

    // proportionality up to a nonzero rational scalar
    static bool proportional(const upoly& a, const upoly& b) {
        if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
        if (a.degree() != b.degree()) return false;
        rational s = a.leading() / b.leading();
        return a == s * b;
    }

    std::string str(const std::string& var = "x") const {
        if (is_zero()) return "0";
        std::string s;
        for (int k = degree(); k >= 0; --k) {
            if (coeff(k) == 0) continue;
            if (!s.empty()) s += " + ";
            s += to_string(coeff(k));
            if (k > 0) s += "*" + var + "^" + std::to_string(k);
        }
        return s;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<rational> c_;  // c_[k] multiplies x^k
};

// sparse multivariate polynomial over the rationals
class mpoly {
  public:
    using expo = std::vector<int>;

    explicit mpoly(int nvars) : nvars_(nvars) {
        if (nvars < 1) throw std::invalid_argument("need at least one variable");
    }
    static mpoly constant(int nvars, const rational& c) {
        mpoly p(nvars);
        if (c != 0) p.t_[expo(static_cast<size_t>(nvars), 0)] = c;
        return p;
    }
    static mpoly var(int nvars, int v, int power = 1) {
        mpoly p(nvars);
        expo e(static_cast<size_t>(nvars), 0);
        e.at(static_cast<size_t>(v)) = power;
        p.t_[std::move(e)] = rational(1);
        return p;
    }

    int nvars() const { return nvars_; }
    bool is_zero() const { return t_.empty(); }
    const std::map<expo, rational>& terms() const { return t_; }

    void add_term(const expo& e, const rational& c) {
        if (c == 0) return;
        auto it = t_.find(e);
        if (it == t_.end()) {
            t_[e] = c;
        } else {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

    friend mpoly operator+(const mpoly& a, const mpoly& b) {
        check(a, b);
        mpoly r = a;
        for (const auto& [e, c] : b.t_) r.add_term(e, c);
        return r;
    }
    friend mpoly operator-(const mpoly& a, const mpoly& b) {
        check(a, b);
        mpoly r = a;
        for (const auto& [e, c] : b.t_) r.add_term(e, -c);
        return r;
    }
    friend mpoly operator*(const mpoly& a, const mpoly& b) {
        check(a, b);
        mpoly r(a.nvars_);
        for (const auto& [ea, ca] : a.t_)
            for (const auto& [eb, cb] : b.t_) {
                expo e(ea);
                for (size_t i = 0; i < e.size(); ++i) e[i] += eb[i];
                r.add_term(e, ca * cb);
            }
        return r;
    }
    friend mpoly operator*(const rational& s, const mpoly& a) {
        mpoly r(a.nvars_);
        if (s == 0) return r;
        r.t_ = a.t_;
        for (auto& [e, c] : r.t_) c *= s;
        return r;
    }
    friend bool operator==(const mpoly&, const mpoly&) = default;

    int degree_in(int v) const {
        int d = -1;
        for (const auto& [e, c] : t_) d = std::max(d, e[static_cast<size_t>(v)]);
        return d;
    }

    // coefficient of v^k, an mpoly with the same variable slots (v-exponent 0)
    mpoly coeff_in(int v, int k) const {
        mpoly r(nvars_);
        for (const auto& [e, c] : t_)
            if (e[static_cast<size_t>(v)] == k) {
                expo e2 = e;
                e2[static_cast<size_t>(v)] = 0;
                r.add_term(e2, c);
            }
        return r;
    }

    mpoly derivative_in(int v) const {
        mpoly r(nvars_);
        for (const auto& [e, c] : t_) {
            const int k = e[static_cast<size_t>(v)];
            if (k == 0) continue;
            expo e2 = e;
            e2[static_cast<size_t>(v)] = k - 1;
            r.add_term(e2, rational(k) * c);
        }
        return r;
    }

    // substitute a polynomial for variable v
    mpoly substitute(int v, const mpoly& value) const {
        check(*this, value);
        mpoly r(nvars_);
        for (const auto& [e, c] : t_) {
            expo e2 = e;
            const int k = e2[static_cast<size_t>(v)];
            e2[static_cast<size_t>(v)] = 0;
            mpoly term(nvars_);
            term.add_term(e2, c);
            for (int i = 0; i < k; ++i) term = term * value;
            r = r + term;
        }
        return r;
    }

    // for two-variable polynomials: coefficients in v as univariate polys in the other
    upoly coeff_in_as_upoly(int v, int k) const {
        if (nvars_ != 2) throw std::invalid_argument("needs exactly two variables");
        const int other = 1 - v;
        mpoly c = coeff_in(v, k);
        std::vector<rational> out;
        for (const auto& [e, cc] : c.t_) {
            const int p = e[static_cast<size_t>(other)];
            if (static_cast<int>(out.size()) <= p) out.resize(static_cast<size_t>(p) + 1, rational(0));
            out[static_cast<size_t>(p)] = cc;
        }
        return upoly(std::move(out));
    }

    static mpoly from_upoly(const upoly& p, int nvars, int v) {
        mpoly r(nvars);
        for (int k = 0; k <= p.degree(); ++k) {
            if (p.coeff(k) == 0) continue;
            expo e(static_cast<size_t>(nvars), 0);
            e[static_cast<size_t>(v)] = k;
            r.add_term(e, p.coeff(k));
        }
        return r;
    }

    // content-normalized copy: divides by the gcd of coefficients, making the
    // leading term (in lexicographic term order) positive
    mpoly primitive() const {
        if (t_.empty()) return mpoly(nvars_);
        bigint gn = 0, gd = 1;
        for (const auto& [e, c] : t_) {
            gn = gcd(gn, numerator(c));
            gd = lcm(gd, denominator(c));
        }
        rational s = rational(gd, gn);
        if (t_.rbegin()->second < 0) s = -s;
        return s * *this;
    }

    std::string str(const std::vector<std::string>& names) const {
        if (t_.empty()) return "0";
        std::string s;
        for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
            if (!s.empty()) s += " + ";
            s += to_string(it->second);
            for (size_t v = 0; v < it->first.size(); ++v)
                if (it->first[v] > 0) {
                    s += "*" + names[v];
                    if (it->first[v] > 1) s += "^" + std::to_string(it->first[v]);
                }
        }
        return s;
    }

  private:
    static void check(const mpoly& a, const mpoly& b) {
        if (a.nvars_ != b.nvars_) throw std::invalid_argument("variable count mismatch");
    }

    int nvars_;
    std::map<expo, rational> t_;
};

namespace detail {

// determinant by expansion along columns, memoized on the row subset
inline mpoly det_mpoly(const std::vector<std::vector<mpoly>>& m, int nvars) {
    const size_t n = m.size();
    std::map<unsigned, mpoly> memo;
    auto rec = [&](auto&& self, unsigned rows, size_t col) -> mpoly {
        if (col == n) return mpoly::constant(nvars, rational(1));
        auto it = memo.find(rows);
        if (it != memo.end()) return it->second;
        mpoly acc(nvars);
        int sign = 1;
        for (size_t r = 0; r < n; ++r) {
            if (!(rows & (1u << r))) continue;
            if (!m[r][col].is_zero()) {
                mpoly sub = self(self, rows & ~(1u << r), col + 1);
                mpoly term = m[r][col] * sub;
                acc = (sign > 0) ? acc + term : acc - term;
            }
            sign = -sign;
        }
        memo.emplace(rows, acc);
        return acc;
    };
    return rec(rec, (n >= 32 ? ~0u : ((1u << n) - 1)), 0);
}

}  // namespace detail

// resultant of p and q with respect to variable v (Sylvester determinant)
inline mpoly resultant(const mpoly& p, const mpoly& q, int v) {
    const int dp = p.degree_in(v);
    const int dq = q.degree_in(v);
    if (dp < 0 || dq < 0) throw std::invalid_argument("resultant of zero polynomial");
    if (dp == 0 && dq == 0) return mpoly::constant(p.nvars(), rational(1));
    const int n = dp + dq;
    std::vector<std::vector<mpoly>> m(static_cast<size_t>(n),
                                      std::vector<mpoly>(static_cast<size_t>(n), mpoly(p.nvars())));
    // dq rows of p coefficients, dp rows of q coefficients
    for (int r = 0; r < dq; ++r)
        for (int k = 0; k <= dp; ++k) m[static_cast<size_t>(r)][static_cast<size_t>(r + k)] =
            p.coeff_in(v, dp - k);
    for (int r = 0; r < dp; ++r)
        for (int k = 0; k <= dq; ++k)
            m[static_cast<size_t>(dq + r)][static_cast<size_t>(r + k)] = q.coeff_in(v, dq - k);
    return detail::det_mpoly(m, p.nvars());
}

// long division of a by b in the variable v over the rational functions of
// the remaining variables; succeeds only when every intermediate quotient
// coefficient divides exactly (monomial division), which holds whenever b
// divides a. Returns true and the quotient on success.
inline bool divide_exact(const mpoly& a, const mpoly& b, int v, mpoly* quotient) {
    const int db = b.degree_in(v);
    if (db < 0) throw std::invalid_argument("division by zero polynomial");
    mpoly lead = b.coeff_in(v, db);
    // the divisor's leading coefficient must be a single term for monomial division
    if (lead.terms().size() != 1) return false;
    const auto& [le, lc] = *lead.terms().begin();

    mpoly rem = a;
    mpoly q(a.nvars());
    while (!rem.is_zero()) {
        const int dr = rem.degree_in(v);
        if (dr < db) return false;
        mpoly rl = rem.coeff_in(v, dr);
        // divide rl by lead term by term
        mpoly qc(a.nvars());
        for (const auto& [e, c] : rl.terms()) {
            mpoly::expo e2 = e;
            for (size_t i = 0; i < e2.size(); ++i) {
                e2[i] -= le[i];
                if (e2[i] < 0) return false;
            }
            qc.add_term(e2, c / lc);
        }
        mpoly qterm = qc * mpoly::var(a.nvars(), v, dr - db);
        q = q + qterm;
        rem = rem - qterm * b;
        if (!rem.is_zero() && rem.degree_in(v) >= dr) return false;  // no progress
    }
    if (quotient) *quotient = q;
    return true;
}

}  // namespace opval
