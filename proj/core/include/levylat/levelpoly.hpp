#pragma once

#include <levylat/rational.hpp>

#include <map>
#include <ostream>

namespace levylat {

/// Laurent polynomial in the block count R = r^m, with exact coefficients.
///
/// Conditional-moment coefficients at a fixed coarse level n are Laurent
/// polynomials in R once the refinement depth m is left symbolic, so the
/// behaviour as m grows is read off from the R-powers: positive powers grow,
/// the R^0 part is the finite part, negative powers vanish.
class LevelPoly {
  public:
    LevelPoly() = default;
    /*implicit*/ LevelPoly(const Rat& c) { set(0, c); }

    static LevelPoly power(int p, Rat c = 1) {
        LevelPoly out;
        out.set(p, std::move(c));
        return out;
    }

    const std::map<int, Rat>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    Rat coeff(int p) const {
        auto it = c_.find(p);
        return it == c_.end() ? Rat(0) : it->second;
    }

    int max_power() const { return c_.empty() ? 0 : c_.rbegin()->first; }
    int min_power() const { return c_.empty() ? 0 : c_.begin()->first; }

    LevelPoly& operator+=(const LevelPoly& o) {
        for (const auto& [p, c] : o.c_) set(p, coeff(p) + c);
        return *this;
    }
    LevelPoly& operator-=(const LevelPoly& o) {
        for (const auto& [p, c] : o.c_) set(p, coeff(p) - c);
        return *this;
    }
    LevelPoly operator+(const LevelPoly& o) const { auto x = *this; x += o; return x; }
    LevelPoly operator-(const LevelPoly& o) const { auto x = *this; x -= o; return x; }
    LevelPoly operator-() const {
        LevelPoly out;
        for (const auto& [p, c] : c_) out.set(p, -c);
        return out;
    }

    LevelPoly operator*(const LevelPoly& o) const {
        LevelPoly out;
        for (const auto& [p1, c1] : c_)
            for (const auto& [p2, c2] : o.c_) out.set(p1 + p2, out.coeff(p1 + p2) + c1 * c2);
        return out;
    }
    LevelPoly operator*(const Rat& s) const {
        LevelPoly out;
        for (const auto& [p, c] : c_) out.set(p, c * s);
        return out;
    }

    /// Division by a monomial c*R^p (all the triangular solves need).
    LevelPoly divided_by_monomial(int p, const Rat& c) const {
        if (c == 0) throw std::domain_error("LevelPoly: division by zero monomial");
        LevelPoly out;
        for (const auto& [q, a] : c_) out.set(q - p, a / c);
        return out;
    }

    bool is_monomial() const { return c_.size() == 1; }

    bool operator==(const LevelPoly& o) const { return c_ == o.c_; }

    /// Substitute R = r^m.
    Rat eval(long r, long m) const {
        Rat acc = 0;
        Rat R = int_pow(Int(r), m);
        for (const auto& [p, c] : c_) acc += c * rat_pow(R, p);
        return acc;
    }

    Rat finite_part() const { return coeff(0); }
    bool has_divergent_part() const { return !c_.empty() && c_.rbegin()->first > 0; }
    bool has_vanishing_part() const { return !c_.empty() && c_.begin()->first < 0; }

    LevelPoly divergent_part() const {
        LevelPoly out;
        for (const auto& [p, c] : c_) if (p > 0) out.set(p, c);
        return out;
    }

    friend std::ostream& operator<<(std::ostream& os, const LevelPoly& x) {
        if (x.c_.empty()) return os << "0";
        bool first = true;
        for (auto it = x.c_.rbegin(); it != x.c_.rend(); ++it) {
            if (!first) os << " + ";
            os << rat_string(it->second);
            if (it->first != 0) os << "*R^" << it->first;
            first = false;
        }
        return os;
    }

  private:
    void set(int p, const Rat& c) {
        if (c == 0) c_.erase(p);
        else c_[p] = c;
    }
    std::map<int, Rat> c_;
};

}  // namespace levylat
