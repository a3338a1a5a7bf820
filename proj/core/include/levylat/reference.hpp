#pragma once

#include <levylat/rational.hpp>

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace levylat {

enum class FamilyKind { Gamma, Gaussian, Cauchy };

std::string family_name(FamilyKind k);
FamilyKind family_from_name(const std::string& name);

/// Lévy triplet behind a reference marginal: drift, diffusion, and a jump
/// part described by an intensity together with a named jump law.
struct LevyCharacteristic {
    double drift = 0.0;
    double diffusion = 0.0;       // coefficient of -xi^2/2
    double jump_intensity = 0.0;  // 0 when the jump measure is infinite but the
                                  // compensated integral still converges
    std::string jump_law;
};

/// Infinitely divisible marginal family {f_n} closed under the refinement
/// convolution rule: the level-(n+1) characteristic function is the r-th root
/// of the level-n one at argument r*xi.
class ReferenceFamily {
  public:
    static ReferenceFamily gamma(Rat alpha0, Rat beta0, int d);
    static ReferenceFamily gaussian(Rat sigma0, int d);
    static ReferenceFamily cauchy(Rat scale, int d);

    FamilyKind kind() const { return kind_; }
    int d() const { return d_; }
    long r() const { return 1L << d_; }

    Rat alpha0() const { return alpha0_; }
    Rat beta0() const { return beta0_; }
    Rat sigma0() const { return sigma0_; }
    Rat scale() const { return scale_; }

    Rat alpha_level(int n) const { return alpha0_ / int_pow(Int(r()), n); }
    Rat beta_level(int n) const { return beta0_ / int_pow(Int(r()), n); }
    Rat sigma_level(int n) const { return sigma0_ * int_pow(Int(r()), n); }

    LevyCharacteristic levy_characteristic() const;

    std::complex<double> char_fn(int n, double xi) const;
    /// Continuous interpolation index: \hat f_t(xi) = \hat f_0(r^t xi)^{1/r^t}.
    std::complex<double> char_fn_t(double t, double xi) const;
    /// k-th derivative in xi of \hat f_t, closed form (Gamma, Gaussian) or
    /// Richardson central differences (Cauchy). At the Cauchy kink the
    /// numerical derivative is what it is; the certificate check relies on it.
    std::complex<double> char_fn_deriv(double t, double xi, int k) const;
    bool has_closed_form_derivatives() const { return kind_ != FamilyKind::Cauchy; }

    double density(int n, double x) const;

    struct CompatibilityReport {
        double max_deviation = 0.0;
        double arg_at_max = 0.0;
        bool branch_warning = false;  // |f| underflowed somewhere on the grid
    };
    /// Max over the grid of |f_{n+1}(xi) - f_n(r xi)^{1/r}|, principal branch.
    CompatibilityReport verify_compatibility(int n, const std::vector<double>& xi_grid) const;

    /// iid draws from the level-n marginal, deterministic per seed.
    std::vector<double> sample(int n, std::size_t count, std::uint64_t seed) const;
    /// One draw, advancing the supplied engine (shared by the MC layer).
    double draw(int n, std::mt19937_64& eng) const;

    /// Per-site moment E[x^p] of the level-n marginal (throws for Cauchy).
    Rat moment(int n, int p) const;

  private:
    ReferenceFamily() = default;
    FamilyKind kind_ = FamilyKind::Gaussian;
    int d_ = 1;
    Rat alpha0_, beta0_, sigma0_, scale_;
};

/// Arithmetic means over consecutive blocks of size block (= r^m).
std::vector<double> coarse_grain(const std::vector<double>& fine, std::size_t block);

/// Certificate that the family satisfies the first-order renormalizability
/// relation at order i: the product of the i-th derivative with the first
/// derivative lies in the span of { \hat f^{(j)} \hat f : j <= i+1 }, with
/// fitted constants c_{i0}..c_{i,i+1} and the least-squares residual.
struct RenormCertificate {
    FamilyKind family;
    int order = 0;
    double t = 0.0;
    std::vector<std::complex<double>> coefficients;  // size order+2
    double residual = 0.0;  // normalized sup-norm misfit over the grid
    double condition = 0.0; // diagonal-pivot ratio of the normal equations
    bool valid = false;
    bool ill_conditioned = false;
};

RenormCertificate check_hypothesis1(const ReferenceFamily& family, int order, double t,
                                    const std::vector<double>& xi_grid, double tol);

/// Symmetric grid of count points on [-max_xi, max_xi].
std::vector<double> make_xi_grid(double max_xi, int count);

}  // namespace levylat
