#pragma once

#include <levylat/rational.hpp>

#include <algorithm>
#include <map>
#include <ostream>
#include <vector>

namespace levylat {

/// Univariate polynomial with exact rational coefficients, ascending order.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Rat> ascending) : c_(std::move(ascending)) { trim(); }

    static Polynomial constant(Rat c) { return Polynomial({std::move(c)}); }
    static Polynomial monomial(const Rat& c, int degree) {
        std::vector<Rat> v(degree + 1, Rat(0));
        v[degree] = c;
        return Polynomial(std::move(v));
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero poly
    bool is_zero() const { return c_.empty(); }

    Rat coeff(int i) const {
        if (i < 0 || i >= static_cast<int>(c_.size())) return 0;
        return c_[i];
    }
    const std::vector<Rat>& coeffs() const { return c_; }

    Rat operator()(const Rat& x) const {
        Rat acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    double operator()(double x) const {
        double acc = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + to_double(*it);
        return acc;
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rat(0));
        for (size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Rat(0));
        for (size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    Polynomial operator+(const Polynomial& o) const { Polynomial p = *this; p += o; return p; }
    Polynomial operator-(const Polynomial& o) const { Polynomial p = *this; p -= o; return p; }

    Polynomial operator*(const Polynomial& o) const {
        if (is_zero() || o.is_zero()) return Polynomial();
        std::vector<Rat> v(c_.size() + o.c_.size() - 1, Rat(0));
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j) v[i + j] += c_[i] * o.c_[j];
        return Polynomial(std::move(v));
    }
    Polynomial operator*(const Rat& s) const {
        std::vector<Rat> v = c_;
        for (auto& x : v) x *= s;
        return Polynomial(std::move(v));
    }

    bool operator==(const Polynomial& o) const { return c_ == o.c_; }

    /// Largest |coefficient| of the difference; exact-zero residual checks.
    Rat max_abs_coeff() const {
        Rat m = 0;
        for (const auto& x : c_) if (abs(x) > m) m = abs(x);
        return m;
    }

    friend std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
        if (p.is_zero()) return os << "0";
        bool first = true;
        for (int i = p.degree(); i >= 0; --i) {
            if (p.c_[i] == 0) continue;
            if (!first) os << " + ";
            os << rat_string(p.c_[i]);
            if (i > 0) os << "*x^" << i;
            first = false;
        }
        return os;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Rat> c_;
};

/// Monomial over sites: site id -> positive exponent.
using SiteMonomial = std::map<int, int>;

/// Sparse polynomial in the site variables, exact coefficients.
class SitePolynomial {
  public:
    SitePolynomial() = default;

    static SitePolynomial constant(Rat c) {
        SitePolynomial p;
        if (c != 0) p.terms_[{}] = std::move(c);
        return p;
    }
    static SitePolynomial monomial(SiteMonomial m, Rat c) {
        SitePolynomial p;
        if (c != 0) p.terms_[std::move(m)] = std::move(c);
        return p;
    }
    static SitePolynomial variable(int site, int exp = 1) {
        return monomial({{site, exp}}, 1);
    }

    const std::map<SiteMonomial, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rat coefficient(const SiteMonomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Rat(0) : it->second;
    }

    SitePolynomial& operator+=(const SitePolynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    SitePolynomial& operator-=(const SitePolynomial& o) {
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    SitePolynomial operator+(const SitePolynomial& o) const { auto p = *this; p += o; return p; }
    SitePolynomial operator-(const SitePolynomial& o) const { auto p = *this; p -= o; return p; }

    SitePolynomial operator*(const SitePolynomial& o) const {
        SitePolynomial out;
        for (const auto& [m1, c1] : terms_)
            for (const auto& [m2, c2] : o.terms_) {
                SiteMonomial m = m1;
                for (const auto& [s, e] : m2) m[s] += e;
                out.add_term(m, c1 * c2);
            }
        return out;
    }
    SitePolynomial operator*(const Rat& s) const {
        SitePolynomial out;
        if (s == 0) return out;
        out.terms_ = terms_;
        for (auto& [m, c] : out.terms_) c *= s;
        return out;
    }

    bool operator==(const SitePolynomial& o) const { return terms_ == o.terms_; }

    Rat evaluate(const std::map<int, Rat>& x) const {
        Rat acc = 0;
        for (const auto& [m, c] : terms_) {
            Rat t = c;
            for (const auto& [s, e] : m) t *= rat_pow(x.at(s), e);
            acc += t;
        }
        return acc;
    }

    double evaluate(const std::vector<double>& x) const {
        double acc = 0;
        for (const auto& [m, c] : terms_) {
            double t = to_double(c);
            for (const auto& [s, e] : m) {
                double v = x[static_cast<size_t>(s)];
                for (int i = 0; i < e; ++i) t *= v;
            }
            acc += t;
        }
        return acc;
    }

    /// Expectation under a product measure with per-site moments E[x_s^p].
    template <typename MomentFn>  // Rat(int site, int power)
    Rat expect(MomentFn&& moment) const {
        Rat acc = 0;
        for (const auto& [m, c] : terms_) {
            Rat t = c;
            for (const auto& [s, e] : m) t *= moment(s, e);
            acc += t;
        }
        return acc;
    }

    Rat max_abs_coeff() const {
        Rat out = 0;
        for (const auto& [m, c] : terms_) if (abs(c) > out) out = abs(c);
        return out;
    }

  private:
    void add_term(const SiteMonomial& m, const Rat& c) {
        if (c == 0) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0) terms_.erase(it);
        }
    }
    std::map<SiteMonomial, Rat> terms_;
};

}  // namespace levylat
