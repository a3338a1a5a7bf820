#pragma once

#include <levylat/condexp.hpp>
#include <levylat/lattice.hpp>
#include <levylat/polynomial.hpp>
#include <levylat/reference.hpp>

#include <map>
#include <utility>
#include <vector>

namespace levylat {

/// Sparse symmetric quadratic form over the sites of one level,
/// Q(x) = (1/r^n) [ sum_i c_ii x_i^2 + sum_{i<i'} c_ii' x_i x_i' ],
/// with each unordered pair stored once (parallel torus edges fold into the
/// coefficient). The kinetic instance has diagonal d * 2^{2n} and off-diagonal
/// -2^{2n} per nearest-neighbour edge.
class QuadraticForm {
  public:
    QuadraticForm(int d, int n, long site_count);

    int d() const { return d_; }
    int level() const { return n_; }
    long site_count() const { return sites_; }
    long r() const { return 1L << d_; }

    void add(long i, long j, const Rat& c);  // accumulates; (i,j) unordered
    Rat coefficient(long i, long j) const;
    const std::map<std::pair<long, long>, Rat>& entries() const { return c_; }

    Rat normalization() const;  // 1/r^n

    Rat evaluate(const std::vector<Rat>& x) const;
    double evaluate(const std::vector<double>& x) const;
    SitePolynomial as_site_polynomial() const;

    /// Row sum of the symmetric matrix of the form (off-diagonal weight split
    /// across both triangles); zero on every row for the pure kinetic form.
    Rat row_sum(long i) const;

  private:
    int d_;
    int n_;
    long sites_;
    std::map<std::pair<long, long>, Rat> c_;
};

/// Torus edge multiset at level n: canonical unordered pairs of linear site
/// ids with multiplicities. Degenerate self-edges of tiny tori are dropped
/// (they carry no gradient).
std::map<std::pair<long, long>, long> torus_edges(int d, int n);

/// Discrete kinetic energy at level n (gradient square per unordered edge).
QuadraticForm kinetic_form(int d, int n);

/// Q(x) for the kinetic form; constant fields give zero.
Rat t_app(int d, int n, const std::vector<Rat>& x);
double t_app(int d, int n, const std::vector<double>& x);

/// The conditional expectation of the refined kinetic energy splits into a
/// multiplier 2^{n+m} on the coarse kinetic energy plus a per-site quadratic
/// shift: E[T^{n+m} | coarse] = 2^{n+m} ( 2^{-n} T^n + d 2^n * mean of shift(x_i) ).
struct KineticCondExp {
    Rat multiplier;        // 2^{n+m}
    Polynomial shift;      // per-site polynomial, at most quadratic
};
KineticCondExp cond_exp_t_app(const ReferenceFamily& family, int n, int m);

/// Brute-force E[T^{n+m} | coarse] over every fine edge, as a polynomial in
/// the coarse sites. Exact; the identity oracle for the closed form above.
SitePolynomial brute_force_kinetic_cond_exp(const ReferenceFamily& family, int n, int m);

/// The closed-form right-hand side assembled as a site polynomial at level n.
SitePolynomial kinetic_identity_rhs(const ReferenceFamily& family, int n, int m);

/// Renormalized kinetic energies (exact coefficients).
Rat t_ren_gamma(const ReferenceFamily& family, int n, const std::vector<Rat>& x);
Rat t_ren_gaussian(const ReferenceFamily& family, int n, const std::vector<Rat>& x);

/// Counterterm coefficients: Gamma subtracts (d 2^n / (alpha_n + 1)) * mean
/// square, Gaussian subtracts the constant d sigma_0 2^n r^n.
Rat gamma_counterterm_coefficient(const ReferenceFamily& family, int n);
Rat gaussian_counterterm_constant(const ReferenceFamily& family, int n);

/// Adjacency of the renormalized kinetic energy for the Gamma family:
/// diagonal d alpha_n 2^n / (1 + alpha_n), off-diagonal -2^n per edge.
QuadraticForm kinetic_adjacency_gamma(const ReferenceFamily& family, int n);
Rat kinetic_adjacency_gamma_diagonal(const ReferenceFamily& family, int n);
Rat kinetic_adjacency_gamma_offdiagonal(int n);

/// Within-window degree bookkeeping: returns (sum over window sites of their
/// hard-wall degree) both by enumeration and by the closed form
/// 2 d side^d - 2 d side^{d-1}; the two must agree.
std::pair<Int, Int> window_degree_sum(int d, int m);

}  // namespace levylat
