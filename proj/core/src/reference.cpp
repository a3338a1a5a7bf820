#include <levylat/reference.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace levylat {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform01(std::mt19937_64& eng) {
    // 53-bit mantissa, strictly inside (0,1)
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_normal(std::mt19937_64& eng) {
    double u1 = uniform01(eng);
    double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Marsaglia-Tsang; shapes below 1 go through the boost trick G(a) = G(a+1) U^{1/a}.
double draw_gamma_shape(double shape, std::mt19937_64& eng) {
    if (shape < 1.0) {
        double u = uniform01(eng);
        return draw_gamma_shape(shape + 1.0, eng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = draw_normal(eng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = uniform01(eng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double draw_cauchy(double scale, std::mt19937_64& eng) {
    double u = uniform01(eng);
    return scale * std::tan(kPi * (u - 0.5));
}

}  // namespace

std::string family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::Gamma: return "gamma";
        case FamilyKind::Gaussian: return "gaussian";
        case FamilyKind::Cauchy: return "cauchy";
    }
    return "?";
}

FamilyKind family_from_name(const std::string& name) {
    if (name == "gamma") return FamilyKind::Gamma;
    if (name == "gaussian") return FamilyKind::Gaussian;
    if (name == "cauchy") return FamilyKind::Cauchy;
    throw std::invalid_argument("unknown family: " + name);
}

ReferenceFamily ReferenceFamily::gamma(Rat alpha0, Rat beta0, int d) {
    if (alpha0 <= 0 || beta0 <= 0) throw std::invalid_argument("gamma family: parameters must be positive");
    if (d < 1) throw std::invalid_argument("gamma family: d must be positive");
    ReferenceFamily f;
    f.kind_ = FamilyKind::Gamma;
    f.d_ = d;
    f.alpha0_ = std::move(alpha0);
    f.beta0_ = std::move(beta0);
    return f;
}

ReferenceFamily ReferenceFamily::gaussian(Rat sigma0, int d) {
    if (sigma0 <= 0) throw std::invalid_argument("gaussian family: sigma0 must be positive");
    if (d < 1) throw std::invalid_argument("gaussian family: d must be positive");
    ReferenceFamily f;
    f.kind_ = FamilyKind::Gaussian;
    f.d_ = d;
    f.sigma0_ = std::move(sigma0);
    return f;
}

ReferenceFamily ReferenceFamily::cauchy(Rat scale, int d) {
    if (scale <= 0) throw std::invalid_argument("cauchy family: scale must be positive");
    if (d < 1) throw std::invalid_argument("cauchy family: d must be positive");
    ReferenceFamily f;
    f.kind_ = FamilyKind::Cauchy;
    f.d_ = d;
    f.scale_ = std::move(scale);
    return f;
}

LevyCharacteristic ReferenceFamily::levy_characteristic() const {
    LevyCharacteristic c;
    switch (kind_) {
        case FamilyKind::Gaussian:
            c.diffusion = to_double(sigma0_);
            break;
        case FamilyKind::Gamma:
            c.drift = 0.0;
            c.jump_intensity = 0.0;  // infinite activity
            c.jump_law = "alpha * exp(-beta x)/x dx on x > 0";
            break;
        case FamilyKind::Cauchy:
            c.jump_intensity = 0.0;  // infinite activity
            c.jump_law = "scale/pi * dx / x^2";
            break;
    }
    return c;
}

std::complex<double> ReferenceFamily::char_fn(int n, double xi) const {
    using namespace std::complex_literals;
    switch (kind_) {
        case FamilyKind::Gamma: {
            double a = to_double(alpha_level(n));
            double b = to_double(beta_level(n));
            return std::pow(1.0 - 1i * (xi / b), -a);
        }
        case FamilyKind::Gaussian: {
            double s = to_double(sigma_level(n));
            return std::exp(-s * xi * xi / 2.0);
        }
        case FamilyKind::Cauchy:
            return std::exp(-to_double(scale_) * std::abs(xi));
    }
    return 0.0;
}

std::complex<double> ReferenceFamily::char_fn_t(double t, double xi) const {
    using namespace std::complex_literals;
    double rt = std::pow(static_cast<double>(r()), t);
    switch (kind_) {
        case FamilyKind::Gamma: {
            double a = to_double(alpha0_) / rt;
            double b = to_double(beta0_) / rt;
            return std::pow(1.0 - 1i * (xi / b), -a);
        }
        case FamilyKind::Gaussian: {
            double s = to_double(sigma0_) * rt;
            return std::exp(-s * xi * xi / 2.0);
        }
        case FamilyKind::Cauchy:
            return std::exp(-to_double(scale_) * std::abs(xi));
    }
    return 0.0;
}

namespace {

// probabilists' Hermite polynomial He_k(u)
double hermite(int k, double u) {
    double h0 = 1.0, h1 = u;
    if (k == 0) return h0;
    if (k == 1) return h1;
    for (int i = 2; i <= k; ++i) {
        double h2 = u * h1 - (i - 1) * h0;
        h0 = h1;
        h1 = h2;
    }
    return h1;
}

}  // namespace

std::complex<double> ReferenceFamily::char_fn_deriv(double t, double xi, int k) const {
    using namespace std::complex_literals;
    if (k == 0) return char_fn_t(t, xi);
    double rt = std::pow(static_cast<double>(r()), t);
    switch (kind_) {
        case FamilyKind::Gamma: {
            double a = to_double(alpha0_) / rt;
            double b = to_double(beta0_) / rt;
            double poch = 1.0;
            for (int i = 0; i < k; ++i) poch *= a + i;
            return std::pow(1i, k) * poch / std::pow(b, k) * std::pow(1.0 - 1i * (xi / b), -a - k);
        }
        case FamilyKind::Gaussian: {
            double s = to_double(sigma0_) * rt;
            double rs = std::sqrt(s);
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            return sign * std::pow(rs, k) * hermite(k, rs * xi) * char_fn_t(t, xi);
        }
        case FamilyKind::Cauchy: {
            // Richardson-extrapolated central differences; the kink at 0 is
            // deliberately left visible to the caller.
            double h = 1e-2 * std::max(1.0, std::abs(xi));
            auto fd = [&](double step) {
                std::complex<double> acc = 0.0;
                // central difference for the k-th derivative via binomial stencil
                for (int j = 0; j <= k; ++j) {
                    double w = binomial(Int(k), j).convert_to<double>();
                    double sgn = ((k - j) % 2 == 0) ? 1.0 : -1.0;
                    acc += sgn * w * char_fn_t(t, xi + (j - k / 2.0) * step);
                }
                return acc / std::pow(step, k);
            };
            std::complex<double> d1 = fd(h);
            std::complex<double> d2 = fd(h / 2.0);
            return (4.0 * d2 - d1) / 3.0;
        }
    }
    return 0.0;
}

double ReferenceFamily::density(int n, double x) const {
    switch (kind_) {
        case FamilyKind::Gamma: {
            double a = to_double(alpha_level(n));
            double b = to_double(beta_level(n));
            if (x <= 0.0) return 0.0;
            return std::exp(a * std::log(b) + (a - 1.0) * std::log(x) - b * x - std::lgamma(a));
        }
        case FamilyKind::Gaussian: {
            double s = to_double(sigma_level(n));
            return std::exp(-x * x / (2.0 * s)) / std::sqrt(2.0 * kPi * s);
        }
        case FamilyKind::Cauchy: {
            double s = to_double(scale_);
            return s / (kPi * (s * s + x * x));
        }
    }
    return 0.0;
}

ReferenceFamily::CompatibilityReport ReferenceFamily::verify_compatibility(
    int n, const std::vector<double>& xi_grid) const {
    CompatibilityReport rep;
    const double rr = static_cast<double>(r());
    for (double xi : xi_grid) {
        std::complex<double> lhs = char_fn(n + 1, xi);
        std::complex<double> base = char_fn(n, rr * xi);
        if (std::abs(base) < 1e-300) {
            rep.branch_warning = true;
            continue;
        }
        std::complex<double> rhs = std::pow(base, 1.0 / rr);
        double dev = std::abs(lhs - rhs);
        if (dev > rep.max_deviation) {
            rep.max_deviation = dev;
            rep.arg_at_max = xi;
        }
    }
    return rep;
}

double ReferenceFamily::draw(int n, std::mt19937_64& eng) const {
    switch (kind_) {
        case FamilyKind::Gamma: {
            double a = to_double(alpha_level(n));
            double b = to_double(beta_level(n));
            return draw_gamma_shape(a, eng) / b;
        }
        case FamilyKind::Gaussian:
            return std::sqrt(to_double(sigma_level(n))) * draw_normal(eng);
        case FamilyKind::Cauchy:
            return draw_cauchy(to_double(scale_), eng);
    }
    return 0.0;
}

std::vector<double> ReferenceFamily::sample(int n, std::size_t count, std::uint64_t seed) const {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    std::mt19937_64 eng(seed);
    std::vector<double> out(count);
    for (auto& x : out) x = draw(n, eng);
    return out;
}

Rat ReferenceFamily::moment(int n, int p) const {
    if (p < 0) throw std::invalid_argument("moment: negative power");
    switch (kind_) {
        case FamilyKind::Gamma:
            return pochhammer(alpha_level(n), p) / rat_pow(beta_level(n), p);
        case FamilyKind::Gaussian: {
            if (p % 2 == 1) return 0;
            return Rat(double_factorial_odd(p / 2)) * rat_pow(sigma_level(n), p / 2);
        }
        case FamilyKind::Cauchy:
            throw std::domain_error("moment: undefined for the Cauchy family");
    }
    return 0;
}

std::vector<double> coarse_grain(const std::vector<double>& fine, std::size_t block) {
    if (block == 0 || fine.size() % block != 0)
        throw std::invalid_argument("coarse_grain: size not a multiple of block");
    std::vector<double> out(fine.size() / block);
    for (std::size_t i = 0; i < out.size(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < block; ++j) acc += fine[i * block + j];
        out[i] = acc / static_cast<double>(block);
    }
    return out;
}

std::vector<double> make_xi_grid(double max_xi, int count) {
    if (count < 2) throw std::invalid_argument("make_xi_grid: need at least 2 points");
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = -max_xi + 2.0 * max_xi * i / (count - 1);
    return g;
}

namespace {

// Least squares for a small complex system via normal equations.
std::vector<std::complex<double>> solve_normal_equations(
    const std::vector<std::vector<std::complex<double>>>& cols,
    const std::vector<std::complex<double>>& rhs, double* condition) {
    using C = std::complex<double>;
    const std::size_t ncols = cols.size();
    const std::size_t nrows = rhs.size();
    std::vector<std::vector<C>> a(ncols, std::vector<C>(ncols, 0.0));
    std::vector<C> b(ncols, 0.0);
    for (std::size_t i = 0; i < ncols; ++i) {
        for (std::size_t j = 0; j < ncols; ++j)
            for (std::size_t g = 0; g < nrows; ++g) a[i][j] += std::conj(cols[i][g]) * cols[j][g];
        for (std::size_t g = 0; g < nrows; ++g) b[i] += std::conj(cols[i][g]) * rhs[g];
    }
    // Gaussian elimination with partial pivoting
    std::vector<std::size_t> perm(ncols);
    for (std::size_t i = 0; i < ncols; ++i) perm[i] = i;
    double min_piv = 1e300, max_piv = 0.0;
    for (std::size_t c = 0; c < ncols; ++c) {
        std::size_t piv = c;
        for (std::size_t rr = c + 1; rr < ncols; ++rr)
            if (std::abs(a[rr][c]) > std::abs(a[piv][c])) piv = rr;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        double p = std::abs(a[c][c]);
        min_piv = std::min(min_piv, p);
        max_piv = std::max(max_piv, p);
        if (p == 0.0) {
            if (condition) *condition = 1e300;
            return std::vector<C>(ncols, 0.0);
        }
        for (std::size_t rr = c + 1; rr < ncols; ++rr) {
            C f = a[rr][c] / a[c][c];
            for (std::size_t cc = c; cc < ncols; ++cc) a[rr][cc] -= f * a[c][cc];
            b[rr] -= f * b[c];
        }
    }
    std::vector<C> x(ncols, 0.0);
    for (std::size_t c = ncols; c-- > 0;) {
        C acc = b[c];
        for (std::size_t cc = c + 1; cc < ncols; ++cc) acc -= a[c][cc] * x[cc];
        x[c] = acc / a[c][c];
    }
    if (condition) *condition = (min_piv > 0.0) ? max_piv / min_piv : 1e300;
    return x;
}

}  // namespace

RenormCertificate check_hypothesis1(const ReferenceFamily& family, int order, double t,
                                    const std::vector<double>& xi_grid, double tol) {
    if (order < 0) throw std::invalid_argument("check_hypothesis1: order must be >= 0");
    if (xi_grid.empty()) throw std::invalid_argument("check_hypothesis1: empty grid");
    using C = std::complex<double>;

    RenormCertificate cert;
    cert.family = family.kind();
    cert.order = order;
    cert.t = t;

    const std::size_t g = xi_grid.size();
    std::vector<std::vector<C>> cols(order + 2, std::vector<C>(g));
    std::vector<C> rhs(g);
    for (std::size_t i = 0; i < g; ++i) {
        double xi = xi_grid[i];
        C f = family.char_fn_t(t, xi);
        C f1 = family.char_fn_deriv(t, xi, 1);
        C fi = family.char_fn_deriv(t, xi, order);
        rhs[i] = fi * f1;
        for (int j = 0; j <= order + 1; ++j) cols[j][i] = family.char_fn_deriv(t, xi, j) * f;
    }

    cert.coefficients = solve_normal_equations(cols, rhs, &cert.condition);
    cert.ill_conditioned = cert.condition > 1e12;

    double scale = 0.0;
    for (std::size_t i = 0; i < g; ++i) scale = std::max(scale, std::abs(rhs[i]));
    scale = std::max(scale, 1e-30);
    double worst = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
        C fit = 0.0;
        for (int j = 0; j <= order + 1; ++j) fit += cert.coefficients[j] * cols[j][i];
        worst = std::max(worst, std::abs(fit - rhs[i]));
    }
    cert.residual = worst / scale;
    cert.valid = cert.residual < tol && !cert.ill_conditioned;
    return cert;
}

}  // namespace levylat
