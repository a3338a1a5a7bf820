#include <levylat/wick.hpp>

#include <cmath>
#include <stdexcept>

namespace levylat {

WickPolynomial wick_gamma(const ReferenceFamily& family, int n, int k) {
    if (family.kind() != FamilyKind::Gamma) throw std::domain_error("wick_gamma: Gamma family only");
    if (k < 1) throw std::invalid_argument("wick_gamma: k must be >= 1");
    Rat coeff = pochhammer(family.alpha0(), k) /
                (rat_pow(Rat(family.r()), static_cast<long>(k) * n) * pochhammer(family.alpha_level(n), k));
    return {FamilyKind::Gamma, n, k, Polynomial::monomial(coeff, k)};
}

WickPolynomial wick_gaussian(const ReferenceFamily& family, int n, int k) {
    if (family.kind() != FamilyKind::Gaussian)
        throw std::domain_error("wick_gaussian: Gaussian family only");
    if (k < 1 || k > 4) throw std::invalid_argument("wick_gaussian: supported degrees are 1..4");
    Rat s = family.sigma_level(n);
    Polynomial p;
    switch (k) {
        case 1: p = Polynomial::monomial(1, 1); break;
        case 2: p = Polynomial::monomial(1, 2) - Polynomial::constant(s); break;
        case 3: p = Polynomial::monomial(1, 3) - Polynomial::monomial(3 * s, 1); break;
        case 4:
            p = Polynomial::monomial(1, 4) - Polynomial::monomial(6 * s, 2) +
                Polynomial::constant(3 * s * s);
            break;
    }
    return {FamilyKind::Gaussian, n, k, std::move(p)};
}

WickPolynomial wick_by_subtraction(const ReferenceFamily& family, int n, int k, int m_max,
                                   SubtractionDiagnostics* diagnostics) {
    if (k < 1) throw std::invalid_argument("wick_by_subtraction: k must be >= 1");
    if (m_max < 2) throw std::invalid_argument("wick_by_subtraction: m_max must be >= 2");
    std::vector<LevelPoly> coeffs = cond_exp_power_symbolic(family, n, k);

    SubtractionDiagnostics diag;
    diag.symbolic_coeffs = coeffs;
    diag.behavior.resize(k + 1, CoefficientBehavior::Zero);
    diag.growth_exponent.resize(k + 1, 0);
    for (int l = 0; l <= k; ++l) {
        const LevelPoly& c = coeffs[l];
        if (c.is_zero()) continue;
        diag.growth_exponent[l] = c.max_power();
        if (c.max_power() > 0) diag.behavior[l] = CoefficientBehavior::Divergent;
        else if (c.max_power() == 0) diag.behavior[l] = CoefficientBehavior::Finite;
        else diag.behavior[l] = CoefficientBehavior::Vanishing;
    }

    // Numeric cross-check of the classification: compare |c(m)| growth between
    // consecutive m against the leading power. Oscillation would show up as a
    // sign flip of a growing coefficient; the built-ins never produce one.
    for (int l = 0; l <= k && diag.fit_confirms; ++l) {
        const LevelPoly& c = coeffs[l];
        if (c.is_zero() || c.is_monomial()) continue;
        double prev = 0.0;
        bool prev_set = false;
        for (int m = m_max - 1; m <= m_max; ++m) {
            double v = to_double(c.eval(family.r(), m));
            if (prev_set && prev != 0.0 && v != 0.0) {
                double measured = std::log(std::abs(v / prev)) / std::log(static_cast<double>(family.r()));
                if (std::abs(measured - diag.growth_exponent[l]) > 0.5) diag.fit_confirms = false;
                if (v * prev < 0.0) diag.oscillation_detected = true;
            }
            prev = v;
            prev_set = true;
        }
    }
    if (diag.oscillation_detected)
        throw std::domain_error("wick_by_subtraction: oscillatory coefficient growth");

    WickPolynomial out;
    out.family = family.kind();
    out.n = n;
    out.k = k;

    diag.multiplicative = diag.behavior[k] == CoefficientBehavior::Divergent;
    if (diag.multiplicative) {
        // All lower coefficients must vanish relative to the top one; for the
        // Gamma family they are identically zero and the renormalization is a
        // pure rescaling fixed by the base-level normalization.
        for (int l = 0; l < k; ++l) {
            if (diag.behavior[l] != CoefficientBehavior::Zero &&
                diag.growth_exponent[l] >= diag.growth_exponent[k])
                throw std::domain_error("wick_by_subtraction: mixed multiplicative/additive growth");
        }
        if (family.kind() != FamilyKind::Gamma)
            throw std::domain_error("wick_by_subtraction: multiplicative route requires the Gamma family");
        out.poly = wick_gamma(family, n, k).poly;
    } else {
        std::vector<Rat> finite(k + 1, Rat(0));
        for (int l = 0; l <= k; ++l) finite[l] = coeffs[l].finite_part();
        out.poly = Polynomial(std::move(finite));
    }
    if (diagnostics) *diagnostics = std::move(diag);
    return out;
}

Rat martingale_residual(const ReferenceFamily& family, int n, int m, int k) {
    WickPolynomial fine = family.kind() == FamilyKind::Gamma ? wick_gamma(family, n + m, k)
                                                             : wick_gaussian(family, n + m, k);
    WickPolynomial coarse = family.kind() == FamilyKind::Gamma ? wick_gamma(family, n, k)
                                                               : wick_gaussian(family, n, k);
    Polynomial lhs = cond_exp_apply(family, n, m, fine.poly);
    return (lhs - coarse.poly).max_abs_coeff();
}

}  // namespace levylat
