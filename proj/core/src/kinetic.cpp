#include <levylat/kinetic.hpp>

#include <stdexcept>

namespace levylat {

QuadraticForm::QuadraticForm(int d, int n, long site_count) : d_(d), n_(n), sites_(site_count) {
    if (d < 1) throw std::invalid_argument("QuadraticForm: d must be positive");
    if (n < 0) throw std::invalid_argument("QuadraticForm: negative level");
    if (site_count < 1) throw std::invalid_argument("QuadraticForm: empty site set");
}

void QuadraticForm::add(long i, long j, const Rat& c) {
    if (i < 0 || i >= sites_ || j < 0 || j >= sites_)
        throw std::out_of_range("QuadraticForm::add: site out of range");
    if (c == 0) return;
    auto key = std::minmax(i, j);
    auto [it, inserted] = c_.emplace(std::make_pair(key.first, key.second), c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) c_.erase(it);
    }
}

Rat QuadraticForm::coefficient(long i, long j) const {
    auto key = std::minmax(i, j);
    auto it = c_.find(std::make_pair(key.first, key.second));
    return it == c_.end() ? Rat(0) : it->second;
}

Rat QuadraticForm::normalization() const {
    return Rat(1, int_pow(Int(r()), n_));
}

Rat QuadraticForm::evaluate(const std::vector<Rat>& x) const {
    if (static_cast<long>(x.size()) != sites_)
        throw std::invalid_argument("QuadraticForm::evaluate: size mismatch");
    Rat acc = 0;
    for (const auto& [ij, c] : c_) acc += c * x[ij.first] * x[ij.second];
    return acc * normalization();
}

double QuadraticForm::evaluate(const std::vector<double>& x) const {
    if (static_cast<long>(x.size()) != sites_)
        throw std::invalid_argument("QuadraticForm::evaluate: size mismatch");
    double acc = 0;
    for (const auto& [ij, c] : c_) acc += to_double(c) * x[ij.first] * x[ij.second];
    return acc * to_double(normalization());
}

SitePolynomial QuadraticForm::as_site_polynomial() const {
    SitePolynomial p;
    Rat norm = normalization();
    for (const auto& [ij, c] : c_) {
        SiteMonomial m;
        if (ij.first == ij.second) m[static_cast<int>(ij.first)] = 2;
        else {
            m[static_cast<int>(ij.first)] = 1;
            m[static_cast<int>(ij.second)] = 1;
        }
        p += SitePolynomial::monomial(std::move(m), c * norm);
    }
    return p;
}

Rat QuadraticForm::row_sum(long i) const {
    Rat acc = 0;
    for (const auto& [ij, c] : c_) {
        if (ij.first == i && ij.second == i) acc += c;
        else if (ij.first == i || ij.second == i) acc += c / 2;
    }
    return acc;
}

std::map<std::pair<long, long>, long> torus_edges(int d, int n) {
    LatticeConfig cfg(d);
    const long side = cfg.side(n);
    const long cells = cfg.cells(n);
    std::map<std::pair<long, long>, long> edges;
    std::vector<long> coords(d, 0);
    for (long id = 0; id < cells; ++id) {
        long rem = id;
        for (int l = d - 1; l >= 0; --l) {
            coords[l] = rem % side;
            rem /= side;
        }
        for (int l = 0; l < d; ++l) {
            std::vector<long> nb = coords;
            nb[l] = (nb[l] + 1) % side;
            long nbid = 0;
            for (int q = 0; q < d; ++q) nbid = nbid * side + nb[q];
            if (nbid == id) continue;  // one-cell side: the step returns home
            auto key = std::minmax(id, nbid);
            edges[std::make_pair(key.first, key.second)] += 1;
        }
    }
    return edges;
}

QuadraticForm kinetic_form(int d, int n) {
    LatticeConfig cfg(d);
    QuadraticForm q(d, n, cfg.cells(n));
    Rat eps2 = rat_pow(Rat(2), 2L * n);  // (1/sidelength)^2
    auto edges = torus_edges(d, n);
    std::vector<Rat> degree(cfg.cells(n), Rat(0));
    for (const auto& [ij, mult] : edges) {
        q.add(ij.first, ij.second, -Rat(mult) * eps2);
        degree[ij.first] += mult;
        degree[ij.second] += mult;
    }
    for (long i = 0; i < cfg.cells(n); ++i) q.add(i, i, degree[i] / 2 * eps2);
    return q;
}

Rat t_app(int d, int n, const std::vector<Rat>& x) { return kinetic_form(d, n).evaluate(x); }
double t_app(int d, int n, const std::vector<double>& x) { return kinetic_form(d, n).evaluate(x); }

KineticCondExp cond_exp_t_app(const ReferenceFamily& family, int n, int m) {
    if (m < 0) throw std::invalid_argument("cond_exp_t_app: negative m");
    KineticCondExp out;
    out.multiplier = rat_pow(Rat(2), n + m);
    if (m == 0) {
        out.shift = Polynomial();
        return out;
    }
    // shift(x) = 2^m E[y^2 | x] - (2^m - 1) E[y y' | x]
    Rat em = rat_pow(Rat(2), m);  // 1/eps^m
    Polynomial x2 = Polynomial::monomial(1, 2);
    Polynomial ey2 = cond_exp_power(family, n, m, 2) - x2;
    Polynomial eyy = cross_moment_yy(family, n, m);
    out.shift = ey2 * em - eyy * (em - 1);
    return out;
}

SitePolynomial brute_force_kinetic_cond_exp(const ReferenceFamily& family, int n, int m) {
    const int d = family.d();
    LatticeConfig cfg(d);

    auto fine_edges = torus_edges(d, n + m);
    const long fine_side = cfg.side(n + m);
    const long coarse_side = cfg.side(n);

    auto cell_of_fine = [&](long fine_id) {
        std::vector<long> coords(d, 0);
        long rem = fine_id;
        for (int l = d - 1; l >= 0; --l) {
            coords[l] = rem % fine_side;
            rem /= fine_side;
        }
        long cid = 0;
        for (int l = 0; l < d; ++l) cid = cid * coarse_side + (coords[l] >> m);
        return cid;
    };

    Rat eps2 = rat_pow(Rat(2), 2L * (n + m));
    Rat norm = Rat(1, int_pow(Int(cfg.r()), n + m));

    // diagonal degrees first
    std::vector<long> degree(cfg.cells(n + m), 0);
    for (const auto& [ij, mult] : fine_edges) {
        degree[ij.first] += mult;
        degree[ij.second] += mult;
    }

    SitePolynomial total;
    Polynomial e_x2 = cond_exp_power(family, n, m, 2);
    Polynomial e_xx = cell_monomial_expectation(family, n, m, {1, 1});

    auto lift = [&](const Polynomial& p, int coarse_site) {
        SitePolynomial out;
        for (int deg = 0; deg <= p.degree(); ++deg) {
            if (p.coeff(deg) == 0) continue;
            SiteMonomial mono;
            if (deg > 0) mono[coarse_site] = deg;
            out += SitePolynomial::monomial(std::move(mono), p.coeff(deg));
        }
        return out;
    };

    for (long i = 0; i < cfg.cells(n + m); ++i) {
        if (degree[i] == 0) continue;
        int ci = static_cast<int>(cell_of_fine(i));
        total += lift(e_x2, ci) * (Rat(degree[i]) / 2 * eps2 * norm);
    }
    for (const auto& [ij, mult] : fine_edges) {
        int ci = static_cast<int>(cell_of_fine(ij.first));
        int cj = static_cast<int>(cell_of_fine(ij.second));
        Rat w = -Rat(mult) * eps2 * norm;
        if (ci == cj) {
            total += lift(e_xx, ci) * w;
        } else {
            SiteMonomial mono;
            mono[ci] = 1;
            mono[cj] = 1;
            total += SitePolynomial::monomial(std::move(mono), w);
        }
    }
    return total;
}

SitePolynomial kinetic_identity_rhs(const ReferenceFamily& family, int n, int m) {
    const int d = family.d();
    LatticeConfig cfg(d);
    KineticCondExp ce = cond_exp_t_app(family, n, m);

    SitePolynomial rhs = kinetic_form(d, n).as_site_polynomial() * rat_pow(Rat(2), -n);
    Rat coeff = Rat(d) * rat_pow(Rat(2), n) * Rat(1, int_pow(Int(cfg.r()), n));
    for (long i = 0; i < cfg.cells(n); ++i) {
        for (int deg = 0; deg <= ce.shift.degree(); ++deg) {
            if (ce.shift.coeff(deg) == 0) continue;
            SiteMonomial mono;
            if (deg > 0) mono[static_cast<int>(i)] = deg;
            rhs += SitePolynomial::monomial(std::move(mono), ce.shift.coeff(deg) * coeff);
        }
    }
    return rhs * ce.multiplier;
}

Rat gamma_counterterm_coefficient(const ReferenceFamily& family, int n) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("gamma_counterterm_coefficient: Gamma family only");
    return Rat(family.d()) * rat_pow(Rat(2), n) / (family.alpha_level(n) + 1);
}

Rat gaussian_counterterm_constant(const ReferenceFamily& family, int n) {
    if (family.kind() != FamilyKind::Gaussian)
        throw std::domain_error("gaussian_counterterm_constant: Gaussian family only");
    return Rat(family.d()) * family.sigma0() * rat_pow(Rat(2), n) *
           int_pow(Int(family.r()), n);
}

Rat t_ren_gamma(const ReferenceFamily& family, int n, const std::vector<Rat>& x) {
    if (family.kind() != FamilyKind::Gamma) throw std::domain_error("t_ren_gamma: Gamma family only");
    Rat tapp = t_app(family.d(), n, x);
    Rat sum_sq = 0;
    for (const Rat& v : x) sum_sq += v * v;
    Rat mean_sq = sum_sq / int_pow(Int(family.r()), n);
    return rat_pow(Rat(2), -n) * tapp - gamma_counterterm_coefficient(family, n) * mean_sq;
}

Rat t_ren_gaussian(const ReferenceFamily& family, int n, const std::vector<Rat>& x) {
    if (family.kind() != FamilyKind::Gaussian)
        throw std::domain_error("t_ren_gaussian: Gaussian family only");
    Rat tapp = t_app(family.d(), n, x);
    return rat_pow(Rat(2), -n) * tapp - gaussian_counterterm_constant(family, n);
}

Rat kinetic_adjacency_gamma_diagonal(const ReferenceFamily& family, int n) {
    Rat a = family.alpha_level(n);
    return Rat(family.d()) * a * rat_pow(Rat(2), n) / (1 + a);
}

Rat kinetic_adjacency_gamma_offdiagonal(int n) { return -rat_pow(Rat(2), n); }

QuadraticForm kinetic_adjacency_gamma(const ReferenceFamily& family, int n) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("kinetic_adjacency_gamma: Gamma family only");
    const int d = family.d();
    LatticeConfig cfg(d);
    QuadraticForm q(d, n, cfg.cells(n));
    Rat offdiag = kinetic_adjacency_gamma_offdiagonal(n);
    for (const auto& [ij, mult] : torus_edges(d, n)) q.add(ij.first, ij.second, Rat(mult) * offdiag);
    Rat diag = kinetic_adjacency_gamma_diagonal(family, n);
    for (long i = 0; i < cfg.cells(n); ++i) q.add(i, i, diag);
    return q;
}

std::pair<Int, Int> window_degree_sum(int d, int m) {
    FineWindow w(d, m);
    Int enumerated = 0;
    for (const auto& p : w.all_points())
        enumerated += static_cast<long>(w.within_region_neighbors(p).size());
    Int side(w.side());
    Int closed = 2 * Int(d) * int_pow(side, d) - 2 * Int(d) * int_pow(side, d - 1);
    return {enumerated, closed};
}

}  // namespace levylat
