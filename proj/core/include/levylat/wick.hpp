#pragma once

#include <levylat/condexp.hpp>
#include <levylat/levelpoly.hpp>
#include <levylat/polynomial.hpp>
#include <levylat/reference.hpp>

#include <string>
#include <vector>

namespace levylat {

/// Degree-k renormalized polynomial at level n: the averaged sums
/// (1/r^n) sum_i V^n_k(x_i) form a cylinder density over the levels.
struct WickPolynomial {
    FamilyKind family;
    int n = 0;
    int k = 0;
    Polynomial poly;
};

/// Gamma family: pure multiplicative renormalization,
/// V^n_k(x) = (alpha_0)_k / (r^{kn} (alpha_n)_k) * x^k, normalized to x^k at n = 0.
WickPolynomial wick_gamma(const ReferenceFamily& family, int n, int k);

/// Gaussian family: Hermite-type subtraction, supported for k <= 4:
/// x, x^2 - s, x^3 - 3 s x, x^4 - 6 s x^2 + 3 s^2 with s = r^n sigma_0.
WickPolynomial wick_gaussian(const ReferenceFamily& family, int n, int k);

/// Per-coefficient growth classification of the symbolic conditional moment.
enum class CoefficientBehavior { Divergent, Finite, Vanishing, Zero };

struct SubtractionDiagnostics {
    std::vector<LevelPoly> symbolic_coeffs;             // coefficient of x^l vs R = r^m
    std::vector<CoefficientBehavior> behavior;          // per degree l
    std::vector<int> growth_exponent;                   // leading R power, a in r^{am}
    bool multiplicative = false;                        // top coefficient itself diverges
    bool oscillation_detected = false;                  // never for the built-ins
    bool fit_confirms = true;                           // numeric growth fit vs m agrees
};

/// Renormalize x^k by the limit recipe: compute E[(x_child)^k | coarse] with m
/// symbolic, classify every coefficient, and keep the finite parts. When the
/// top coefficient itself grows with m the renormalization is multiplicative
/// and the result is the rescaled monomial with the Gamma normalization.
WickPolynomial wick_by_subtraction(const ReferenceFamily& family, int n, int k, int m_max,
                                   SubtractionDiagnostics* diagnostics = nullptr);

/// Residual of the cylinder-density identity at (n, m): largest coefficient of
/// E[V^{n+m}_k(x_child) | coarse] - V^n_k. Exactly zero for both built-ins.
Rat martingale_residual(const ReferenceFamily& family, int n, int m, int k);

}  // namespace levylat
