#include <levylat/condexp.hpp>

#include <stdexcept>

namespace levylat {

RMatrix::RMatrix(int order) : order_(order) {
    if (order < 0) throw std::invalid_argument("RMatrix: negative order");
    a_.resize(order + 1);
    for (int i = 0; i <= order; ++i) a_[i].assign(i + 1, Rat(0));
}

Rat RMatrix::at(int i, int j) const {
    if (i < 0 || i > order_ || j < 0 || j > order_) throw std::out_of_range("RMatrix::at");
    if (j > i) return 0;
    return a_[i][j];
}

void RMatrix::set(int i, int j, Rat v) {
    if (i < 0 || i > order_ || j < 0 || j > i) throw std::out_of_range("RMatrix::set");
    a_[i][j] = std::move(v);
}

RMatrix RMatrix::identity(int order) {
    RMatrix m(order);
    for (int i = 0; i <= order; ++i) m.a_[i][i] = 1;
    return m;
}

RMatrix RMatrix::inverse() const {
    RMatrix inv(order_);
    for (int i = 0; i <= order_; ++i) {
        if (a_[i][i] == 0) throw std::domain_error("RMatrix::inverse: singular diagonal");
        inv.a_[i][i] = Rat(1) / a_[i][i];
        for (int j = i - 1; j >= 0; --j) {
            Rat acc = 0;
            for (int l = j; l < i; ++l) acc += a_[i][l] * inv.a_[l][j];
            inv.a_[i][j] = -acc / a_[i][i];
        }
    }
    return inv;
}

RMatrix RMatrix::operator*(const RMatrix& o) const {
    if (order_ != o.order_) throw std::invalid_argument("RMatrix::operator*: order mismatch");
    RMatrix out(order_);
    for (int i = 0; i <= order_; ++i)
        for (int j = 0; j <= i; ++j) {
            Rat acc = 0;
            for (int l = j; l <= i; ++l) acc += a_[i][l] * o.a_[l][j];
            out.a_[i][j] = acc;
        }
    return out;
}

RMatrix RMatrix::truncated(int order) const {
    if (order > order_) throw std::invalid_argument("RMatrix::truncated: larger than source");
    RMatrix out(order);
    for (int i = 0; i <= order; ++i)
        for (int j = 0; j <= i; ++j) out.a_[i][j] = a_[i][j];
    return out;
}

Rat RMatrix::max_abs_diff(const RMatrix& o) const {
    if (order_ != o.order_) throw std::invalid_argument("RMatrix::max_abs_diff: order mismatch");
    Rat out = 0;
    for (int i = 0; i <= order_; ++i)
        for (int j = 0; j <= i; ++j) {
            Rat d = abs(a_[i][j] - o.a_[i][j]);
            if (d > out) out = d;
        }
    return out;
}

namespace {

void require_certificate(const ReferenceFamily& family) {
    if (family.kind() == FamilyKind::Cauchy)
        throw std::domain_error("R-matrix calculus requires a renormalizability certificate; "
                                "the Cauchy family has none");
}

RMatrix gamma_r_inverse(const Rat& alpha, const Rat& lambda, int k) {
    RMatrix m(k);
    for (int j = 0; j <= k; ++j)
        m.set(j, j, pochhammer(lambda * alpha, j) / pochhammer(alpha, j));
    return m;
}

RMatrix gaussian_r_inverse(const Rat& sigma, const Rat& lambda, int k) {
    // entry (a, a-2i) = lambda^a (sigma (1 - 1/lambda))^i C(a,2i) (2i-1)!!
    RMatrix m(k);
    Rat u = sigma * (Rat(1) - Rat(1) / lambda);
    for (int a = 0; a <= k; ++a) {
        Rat la = rat_pow(lambda, a);
        for (int i = 0; 2 * i <= a; ++i) {
            Rat entry = la * rat_pow(u, i) * Rat(binomial(Int(a), 2 * i) * double_factorial_odd(i));
            m.set(a, a - 2 * i, entry);
        }
    }
    return m;
}

}  // namespace

RMatrix r_matrix_inverse(const ReferenceFamily& family, const Rat& lambda, int k) {
    require_certificate(family);
    if (lambda <= 0) throw std::invalid_argument("r_matrix: lambda must be positive");
    switch (family.kind()) {
        case FamilyKind::Gamma: return gamma_r_inverse(family.alpha0(), lambda, k);
        case FamilyKind::Gaussian: return gaussian_r_inverse(family.sigma0(), lambda, k);
        default: break;
    }
    throw std::domain_error("r_matrix_inverse: no closed form");
}

RMatrix r_matrix(const ReferenceFamily& family, const Rat& lambda, int k) {
    return r_matrix_inverse(family, lambda, k).inverse();
}

RMatrix r_ratio(const ReferenceFamily& family, const Rat& mu, const Rat& lambda, int k) {
    // R(mu,lambda) = R(mu)^{-1} R(lambda) = Rinv(mu) * Rinv(lambda)^{-1}
    return r_matrix_inverse(family, mu, k) * r_matrix_inverse(family, lambda, k).inverse();
}

NumericRMatrix r_matrix_numeric(const ReferenceFamily& family, double lambda, int k,
                                const std::vector<double>& xi_grid) {
    using C = std::complex<double>;
    if (xi_grid.size() < static_cast<std::size_t>(k + 2))
        throw std::invalid_argument("r_matrix_numeric: grid too small");
    NumericRMatrix out;
    out.order = k;
    out.entries.assign(k + 1, {});

    // derivatives of f^lambda by central differences of pow(f, lambda)
    auto f_pow_lambda = [&](double xi) { return std::pow(family.char_fn_t(0.0, xi), lambda); };
    auto deriv_pow = [&](double xi, int a) -> C {
        if (a == 0) return f_pow_lambda(xi);
        double h = 5e-3 * std::max(1.0, std::abs(xi));
        auto fd = [&](double step) {
            C acc = 0.0;
            for (int j = 0; j <= a; ++j) {
                double w = binomial(Int(a), j).convert_to<double>();
                double sgn = ((a - j) % 2 == 0) ? 1.0 : -1.0;
                acc += sgn * w * f_pow_lambda(xi + (j - a / 2.0) * step);
            }
            return acc / std::pow(step, a);
        };
        C d1 = fd(h), d2 = fd(h / 2.0);
        return (4.0 * d2 - d1) / 3.0;
    };

    const std::size_t g = xi_grid.size();
    double worst = 0.0;
    for (int a = 0; a <= k; ++a) {
        std::vector<std::vector<C>> cols(a + 1, std::vector<C>(g));
        std::vector<C> rhs(g);
        for (std::size_t i = 0; i < g; ++i) {
            double xi = xi_grid[i];
            C f = family.char_fn_t(0.0, xi);
            C flm1 = std::pow(f, lambda - 1.0);
            rhs[i] = flm1 * family.char_fn_deriv(0.0, xi, a);
            for (int b = 0; b <= a; ++b) cols[b][i] = deriv_pow(xi, b);
        }
        // normal equations (small, reuse the dense complex solver shape)
        std::vector<std::vector<C>> mat(a + 1, std::vector<C>(a + 1, 0.0));
        std::vector<C> vec(a + 1, 0.0);
        for (int i = 0; i <= a; ++i) {
            for (int j = 0; j <= a; ++j)
                for (std::size_t gg = 0; gg < g; ++gg) mat[i][j] += std::conj(cols[i][gg]) * cols[j][gg];
            for (std::size_t gg = 0; gg < g; ++gg) vec[i] += std::conj(cols[i][gg]) * rhs[gg];
        }
        for (int c = 0; c <= a; ++c) {
            int piv = c;
            for (int rr = c + 1; rr <= a; ++rr)
                if (std::abs(mat[rr][c]) > std::abs(mat[piv][c])) piv = rr;
            std::swap(mat[c], mat[piv]);
            std::swap(vec[c], vec[piv]);
            if (std::abs(mat[c][c]) == 0.0) throw std::domain_error("r_matrix_numeric: singular fit");
            for (int rr = c + 1; rr <= a; ++rr) {
                C fct = mat[rr][c] / mat[c][c];
                for (int cc = c; cc <= a; ++cc) mat[rr][cc] -= fct * mat[c][cc];
                vec[rr] -= fct * vec[c];
            }
        }
        std::vector<C> row(a + 1, 0.0);
        for (int c = a; c >= 0; --c) {
            C acc = vec[c];
            for (int cc = c + 1; cc <= a; ++cc) acc -= mat[c][cc] * row[cc];
            row[c] = acc / mat[c][c];
        }
        double scale = 1e-30;
        for (std::size_t i = 0; i < g; ++i) scale = std::max(scale, std::abs(rhs[i]));
        for (std::size_t i = 0; i < g; ++i) {
            C fit = 0.0;
            for (int b = 0; b <= a; ++b) fit += row[b] * cols[b][i];
            worst = std::max(worst, std::abs(fit - rhs[i]) / scale);
        }
        out.entries[a] = std::move(row);
    }
    out.residual = worst;
    return out;
}

namespace {

Rat r_of(const ReferenceFamily& family) { return Rat(family.r()); }

}  // namespace

Polynomial cond_exp_power(const ReferenceFamily& family, int n, int m, int k) {
    if (k < 0) throw std::invalid_argument("cond_exp_power: k must be >= 0");
    if (n < 0 || m < 0) throw std::invalid_argument("cond_exp_power: negative level");
    require_certificate(family);
    Rat r = r_of(family);
    Rat mu = rat_pow(r, -(n + m));
    Rat lambda = rat_pow(r, -n);
    RMatrix R = r_ratio(family, mu, lambda, k);
    std::vector<Rat> coeffs(k + 1, Rat(0));
    Rat rkNM = rat_pow(r, static_cast<long>(k) * (n + m));
    for (int l = 0; l <= k; ++l) {
        if ((k - l) % 2 != 0) continue;  // parity: odd entries vanish for these families
        Rat sign = ((k - l) / 2) % 2 == 0 ? 1 : -1;
        coeffs[l] = sign * rkNM * rat_pow(r, -static_cast<long>(n) * l) * R.at(k, l);
    }
    return Polynomial(std::move(coeffs));
}

namespace {

// Symbolic lower-triangular matrices over Laurent polynomials in R = r^m.
class SymMatrix {
  public:
    explicit SymMatrix(int order) : order_(order), a_(order + 1) {
        for (int i = 0; i <= order; ++i) a_[i].assign(i + 1, LevelPoly());
    }
    LevelPoly& at(int i, int j) { return a_[i][j]; }
    const LevelPoly& at(int i, int j) const { return a_[i][j]; }
    int order() const { return order_; }

    SymMatrix inverse() const {
        SymMatrix inv(order_);
        for (int i = 0; i <= order_; ++i) {
            const LevelPoly& dia = a_[i][i];
            if (!dia.is_monomial())
                throw std::domain_error("SymMatrix::inverse: non-monomial diagonal");
            int p = dia.max_power();
            Rat c = dia.coeff(p);
            inv.a_[i][i] = LevelPoly::power(-p, Rat(1) / c);
            for (int j = i - 1; j >= 0; --j) {
                LevelPoly acc;
                for (int l = j; l < i; ++l) acc += a_[i][l] * inv.a_[l][j];
                inv.a_[i][j] = (-acc).divided_by_monomial(p, c);
            }
        }
        return inv;
    }

    SymMatrix operator*(const SymMatrix& o) const {
        SymMatrix out(order_);
        for (int i = 0; i <= order_; ++i)
            for (int j = 0; j <= i; ++j) {
                LevelPoly acc;
                for (int l = j; l <= i; ++l) acc += a_[i][l] * o.a_[l][j];
                out.a_[i][j] = acc;
            }
        return out;
    }

  private:
    int order_;
    std::vector<std::vector<LevelPoly>> a_;
};

SymMatrix r_inverse_symbolic(const ReferenceFamily& family, int n, int k, bool at_fine_level) {
    // lambda = r^{-n} (constant) or mu = r^{-n}/R (fine level, symbolic)
    Rat r = Rat(family.r());
    Rat lam_const = rat_pow(r, -n);
    SymMatrix m(k);
    if (family.kind() == FamilyKind::Gamma) {
        // diag_j = (lambda alpha0)_j / (alpha0)_j; lambda alpha0 = alpha_n (or alpha_n / R)
        Rat alpha_n = family.alpha_level(n);
        for (int j = 0; j <= k; ++j) {
            LevelPoly poch = Rat(1);
            for (int t = 0; t < j; ++t) {
                LevelPoly factor = at_fine_level
                                       ? LevelPoly::power(-1, alpha_n) + LevelPoly(Rat(t))
                                       : LevelPoly(alpha_n + t);
                poch = poch * factor;
            }
            m.at(j, j) = poch * (Rat(1) / pochhammer(family.alpha0(), j));
        }
        return m;
    }
    if (family.kind() == FamilyKind::Gaussian) {
        // entry (a, a-2i) = lambda^a (sigma (1 - 1/lambda))^i C(a,2i)(2i-1)!!
        Rat sigma = family.sigma0();
        for (int a = 0; a <= k; ++a) {
            LevelPoly la = at_fine_level ? LevelPoly::power(-a, rat_pow(lam_const, a))
                                         : LevelPoly(rat_pow(lam_const, a));
            // u = sigma (1 - 1/lambda); 1/lambda = r^n (coarse) or r^n R (fine)
            LevelPoly inv_lambda = at_fine_level
                                       ? LevelPoly::power(1, rat_pow(lam_const, -1))
                                       : LevelPoly(rat_pow(lam_const, -1));
            LevelPoly u = (LevelPoly(Rat(1)) - inv_lambda) * sigma;
            LevelPoly upow = Rat(1);
            for (int i = 0; 2 * i <= a; ++i) {
                Rat comb = Rat(binomial(Int(a), 2 * i) * double_factorial_odd(i));
                m.at(a, a - 2 * i) += la * upow * comb;
                upow = upow * u;
            }
        }
        return m;
    }
    throw std::domain_error("r_inverse_symbolic: no closed form");
}

}  // namespace

std::vector<LevelPoly> cond_exp_power_symbolic(const ReferenceFamily& family, int n, int k) {
    require_certificate(family);
    // R(mu, lambda) with mu = r^{-n}/R symbolic and lambda = r^{-n}
    SymMatrix rinv_mu = r_inverse_symbolic(family, n, k, /*at_fine_level=*/true);
    SymMatrix rinv_lam = r_inverse_symbolic(family, n, k, /*at_fine_level=*/false);
    SymMatrix ratio = rinv_mu * rinv_lam.inverse();

    Rat r = Rat(family.r());
    std::vector<LevelPoly> coeffs(k + 1);
    // (r^{n+m})^k = r^{nk} R^k
    LevelPoly rkNM = LevelPoly::power(k, rat_pow(r, static_cast<long>(k) * n));
    for (int l = 0; l <= k; ++l) {
        if ((k - l) % 2 != 0) continue;
        Rat sign = ((k - l) / 2) % 2 == 0 ? 1 : -1;
        coeffs[l] = ratio.at(k, l) * rkNM * (sign * rat_pow(r, -static_cast<long>(n) * l));
    }
    return coeffs;
}

Rat gamma_cond_exp_monomial(const ReferenceFamily& family, int n, int m, const MonomialSpec& spec) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("gamma_cond_exp_monomial: Gamma family only");
    long rm = 1L << (family.d() * m);
    if (static_cast<long>(spec.exponents.size()) > rm)
        throw std::invalid_argument("gamma_cond_exp_monomial: more factors than children");
    for (long e : spec.exponents)
        if (e < 1) throw std::invalid_argument("gamma_cond_exp_monomial: exponents must be >= 1");
    long k = spec.total();
    Rat alpha_nm = family.alpha_level(n + m);
    Rat num = rat_pow(Rat(family.r()), static_cast<long>(m) * k);
    for (long e : spec.exponents) num *= pochhammer(alpha_nm, e);
    return num / pochhammer(family.alpha_level(n), k);
}

Polynomial cell_monomial_expectation(const ReferenceFamily& family, int n, int m,
                                     const std::vector<long>& degrees) {
    std::vector<long> degs;
    for (long e : degrees)
        if (e > 0) degs.push_back(e);
    long total = 0;
    for (long e : degs) total += e;
    if (degs.empty()) return Polynomial::constant(1);

    if (family.kind() == FamilyKind::Gamma) {
        MonomialSpec spec{degs};
        return Polynomial::monomial(gamma_cond_exp_monomial(family, n, m, spec),
                                    static_cast<int>(total));
    }
    if (family.kind() == FamilyKind::Gaussian) {
        if (degs.size() == 1) return cond_exp_power(family, n, m, static_cast<int>(degs[0]));
        if (degs.size() == 2 && degs[0] == 1 && degs[1] == 1) {
            // E[x_j x_j' | x] = x^2 + E[y y' | x]
            Polynomial p = Polynomial::monomial(1, 2);
            p += cross_moment_yy(family, n, m);
            return p;
        }
        throw std::domain_error("cell_monomial_expectation: Gaussian path supports total degree <= 2");
    }
    throw std::domain_error("cell_monomial_expectation: unsupported family");
}

Polynomial cross_moment_yy(const ReferenceFamily& family, int n, int m) {
    if (m < 1) throw std::invalid_argument("cross_moment_yy: need m >= 1");
    long rm = 1L << (family.d() * m);
    if (rm < 2) throw std::invalid_argument("cross_moment_yy: need at least 2 children");
    Polynomial x2 = Polynomial::monomial(1, 2);
    Polynomial exp2 = cond_exp_power(family, n, m, 2);
    return (x2 - exp2) * (Rat(1) / Rat(rm - 1));
}

Polynomial cond_exp_apply(const ReferenceFamily& family, int n, int m, const Polynomial& p) {
    Polynomial out;
    for (int k = 0; k <= p.degree(); ++k) {
        if (p.coeff(k) == 0) continue;
        out += cond_exp_power(family, n, m, k) * p.coeff(k);
    }
    return out;
}

bool tower_check(const ReferenceFamily& family, int n, int m1, int m2, int k) {
    Polynomial inner = cond_exp_power(family, n + m1, m2, k);
    Polynomial composed = cond_exp_apply(family, n, m1, inner);
    Polynomial direct = cond_exp_power(family, n, m1 + m2, k);
    return composed == direct;
}

}  // namespace levylat
