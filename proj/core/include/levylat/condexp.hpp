#pragma once

#include <levylat/levelpoly.hpp>
#include <levylat/polynomial.hpp>
#include <levylat/reference.hpp>

#include <complex>
#include <vector>

namespace levylat {

/// Lower-triangular change of basis between the derivative vectors of
/// \hat f^lambda and the products \hat f^{(j)} \hat f^{lambda-1}, indexed from 0.
/// Exact rational entries; the order-k matrix is the order-(k+1) matrix with
/// the last row and column erased.
class RMatrix {
  public:
    explicit RMatrix(int order);

    int order() const { return order_; }
    Rat at(int i, int j) const;
    void set(int i, int j, Rat v);

    static RMatrix identity(int order);
    RMatrix inverse() const;                   // forward substitution
    RMatrix operator*(const RMatrix& o) const;
    RMatrix truncated(int order) const;
    bool operator==(const RMatrix& o) const { return a_ == o.a_; }

    Rat max_abs_diff(const RMatrix& o) const;

  private:
    int order_;
    std::vector<std::vector<Rat>> a_;  // a_[i] has i+1 entries
};

/// R(lambda)^{-1} in closed form; the certificate families only.
RMatrix r_matrix_inverse(const ReferenceFamily& family, const Rat& lambda, int k);
/// R(lambda) = [R(lambda)^{-1}]^{-1}.
RMatrix r_matrix(const ReferenceFamily& family, const Rat& lambda, int k);
/// R(mu, lambda) = R(mu)^{-1} R(lambda); satisfies the cocycle identity.
RMatrix r_ratio(const ReferenceFamily& family, const Rat& mu, const Rat& lambda, int k);

/// Numeric R(lambda) for families without a closed form: least-squares fit of
/// the defining relation on a xi grid. Experimental path.
struct NumericRMatrix {
    int order = 0;
    std::vector<std::vector<std::complex<double>>> entries;
    double residual = 0.0;
    bool experimental = true;
};
NumericRMatrix r_matrix_numeric(const ReferenceFamily& family, double lambda, int k,
                                const std::vector<double>& xi_grid);

/// E[(x_child)^k | coarse field] as a polynomial in the coarse value, exact.
/// Degree 1 is the identity polynomial for every family.
Polynomial cond_exp_power(const ReferenceFamily& family, int n, int m, int k);

/// Same coefficients with the refinement depth m symbolic (R = r^m).
std::vector<LevelPoly> cond_exp_power_symbolic(const ReferenceFamily& family, int n, int k);

/// Exponents on p distinct children of one coarse cell.
struct MonomialSpec {
    std::vector<long> exponents;  // all >= 1
    long total() const {
        long k = 0;
        for (long e : exponents) k += e;
        return k;
    }
};

/// Coefficient c in E[prod_t (x_{child_t})^{k_t} | coarse] = c * x^k for the
/// Gamma family; exact rational. Throws when the cell has fewer than p children.
Rat gamma_cond_exp_monomial(const ReferenceFamily& family, int n, int m, const MonomialSpec& spec);

/// E[prod over children of one cell | coarse] for the degree profiles the
/// kinetic identities need: any profile for Gamma, total degree <= 2 for
/// Gaussian. Returns a polynomial in the coarse value.
Polynomial cell_monomial_expectation(const ReferenceFamily& family, int n, int m,
                                     const std::vector<long>& degrees);

/// E[y_j y_j' | coarse] for distinct children j != j', as a polynomial in the
/// coarse value: (x^2 - E[x_child^2 | x]) / (r^m - 1).
Polynomial cross_moment_yy(const ReferenceFamily& family, int n, int m);

/// Conditional expectation as a linear operator on polynomials in one child value.
Polynomial cond_exp_apply(const ReferenceFamily& family, int n, int m, const Polynomial& p);

/// Composing n -> n+m1 -> n+m1+m2 equals the direct map; exact comparison.
bool tower_check(const ReferenceFamily& family, int n, int m1, int m2, int k);

}  // namespace levylat
