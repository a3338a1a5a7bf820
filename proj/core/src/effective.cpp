#include <levylat/effective.hpp>

#include <levylat/condexp.hpp>

#include <cmath>
#include <functional>
#include <stdexcept>

namespace levylat {

PartitionCombinatorics partition_numbers(int k) {
    if (k < 0 || k > 30) throw std::invalid_argument("partition_numbers: k must be in 0..30");
    PartitionCombinatorics out;
    out.k = k;
    // Stirling partition row via the triangle recurrence
    std::vector<std::vector<Int>> s(k + 1);
    for (int row = 0; row <= k; ++row) {
        s[row].assign(row + 1, Int(0));
        s[row][0] = (row == 0) ? 1 : 0;
        for (int l = 1; l <= row; ++l)
            s[row][l] = Int(l) * (l <= row - 1 ? s[row - 1][l] : Int(0)) + s[row - 1][l - 1];
    }
    out.stirling = s[k];
    out.bell = 0;
    for (const auto& v : out.stirling) out.bell += v;
    out.fubini = 0;
    for (int l = 0; l <= k; ++l) out.fubini += factorial(l) * out.stirling[l];

    // integer partitions p(k) by restricted-part dynamic programming
    std::vector<Int> p(k + 1, Int(0));
    p[0] = 1;
    for (int part = 1; part <= k; ++part)
        for (int tot = part; tot <= k; ++tot) p[tot] += p[tot - part];
    out.integer_partitions = p[k];

    double pk = out.integer_partitions.convert_to<double>();
    double bl = out.bell.convert_to<double>();
    out.bell_vs_integer_gap = pk > 0 ? std::abs(bl - pk) / pk : 0.0;
    return out;
}

double integer_partition_asymptotic(int k) {
    if (k < 1) return 1.0;
    return std::exp(M_PI * std::sqrt(2.0 * k / 3.0)) / (4.0 * k * std::sqrt(3.0));
}

double fubini_asymptotic(int k) {
    double log2 = std::log(2.0);
    return factorial(k).convert_to<double>() / (2.0 * std::pow(log2, k + 1));
}

Rat mass_lren_coefficient(const ReferenceFamily& family, int n) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("mass_lren: Gamma family only");
    return (family.alpha0() + 1) / (family.alpha0() + int_pow(Int(family.r()), n));
}

QuadraticForm mass_lren(const ReferenceFamily& family, int n, long site_count) {
    QuadraticForm q(family.d(), n, site_count);
    Rat c = mass_lren_coefficient(family, n);
    for (long i = 0; i < site_count; ++i) q.add(i, i, c);
    return q;
}

namespace {

// partitions of k into exactly l positive parts, nonincreasing
void integer_partitions_into(int k, int l, std::vector<long>& current,
                             const std::function<void(const std::vector<long>&)>& visit) {
    if (l == 0) {
        if (k == 0) visit(current);
        return;
    }
    int hi = current.empty() ? k : static_cast<int>(current.back());
    for (int part = std::min(hi, k - (l - 1)); part >= 1; --part) {
        current.push_back(part);
        integer_partitions_into(k - part, l - 1, current, visit);
        current.pop_back();
    }
}

// distinct arrangements of the parts over l labelled loops: l! / prod(value multiplicities)!
Int arrangement_count(const std::vector<long>& parts) {
    Int num = factorial(static_cast<long>(parts.size()));
    long run = 1;
    for (std::size_t i = 1; i <= parts.size(); ++i) {
        if (i < parts.size() && parts[i] == parts[i - 1]) {
            ++run;
        } else {
            num /= factorial(run);
            run = 1;
        }
    }
    return num;
}

Rat chi_connected_loops(const ReferenceFamily& family, int n, int m,
                        const std::vector<long>& loop_mults) {
    MultiGraph g;
    for (std::size_t j = 0; j < loop_mults.size(); ++j)
        g.multiply(GraphEdge(static_cast<long>(j), static_cast<long>(j)), loop_mults[j]);
    GammaGraphContext ctx{family, n, m, [](long) { return 0L; }};
    return chi_connected(ctx, g).coeff;
}

}  // namespace

Rat placement_factor(const ReferenceFamily& family, int m, int k, int l) {
    if (l < 1 || l > k) throw std::invalid_argument("placement_factor: need 1 <= l <= k");
    Int rm = int_pow(Int(family.r()), m);
    Rat choose = Rat(binomial(rm, l)) / Rat(int_pow(Int(family.r()), static_cast<long>(m) * l));
    // sum over compositions of multinomial(k; parts) = l! * Stirling(k, l)
    PartitionCombinatorics pc = partition_numbers(k);
    return choose * Rat(factorial(l) * pc.stirling[l]);
}

Rat bouquet_sum(const ReferenceFamily& family, int n, int m, int k) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("bouquet_sum: Gamma family only");
    if (k < 1 || k > 6) throw std::invalid_argument("bouquet_sum: k must be in 1..6");
    if (m < 1 || m > 8) throw std::invalid_argument("bouquet_sum: m must be in 1..8");

    Int rm_int = int_pow(Int(family.r()), m);
    Rat c_diag = mass_lren_coefficient(family, n + m);
    Rat c_pow_k = rat_pow(c_diag, k);
    Rat norm = Rat(1, int_pow(rm_int, k));

    Rat acc = 0;
    for (int l = 1; l <= k; ++l) {
        if (Int(l) > rm_int) break;
        Rat level_acc = 0;
        std::vector<long> parts;
        integer_partitions_into(k, l, parts, [&](const std::vector<long>& lambda) {
            Int ways = binomial(rm_int, l) * arrangement_count(lambda);
            Int orderings = multinomial(lambda);
            Rat cc = chi_connected_loops(family, n, m, lambda);
            level_acc += Rat(ways * orderings) * cc;
        });
        acc += level_acc;
    }
    return acc * c_pow_k * norm;
}

double mass_limit_envelope(const ReferenceFamily& family, int n, int k) {
    PartitionCombinatorics pc = partition_numbers(k);
    Rat alpha_n = family.alpha_level(n);
    Rat r2n = rat_pow(Rat(family.r()), 2L * n);
    Rat scale = pochhammer(family.alpha0(), 2) / (r2n * pochhammer(alpha_n, 2));
    double per_graph = std::pow(to_double(scale), k);
    double slack = std::pow(std::max(1.0, 1.0 / to_double(alpha_n)), k - 1);
    return pc.bell.convert_to<double>() * fubini_asymptotic(k) * per_graph * slack;
}

LimitReport mass_coefficient_limit(const ReferenceFamily& family, int n, int k, int m_max) {
    if (m_max < 3) throw std::invalid_argument("mass_coefficient_limit: need m_max >= 3");
    LimitReport rep;
    for (int m = 1; m <= m_max; ++m) rep.values.push_back(bouquet_sum(family, n, m, k));
    for (std::size_t i = 1; i < rep.values.size(); ++i)
        rep.differences.push_back(rep.values[i] - rep.values[i - 1]);
    for (std::size_t i = 1; i < rep.differences.size(); ++i) {
        if (rep.differences[i - 1] == 0) {
            rep.ratios.push_back(0.0);
        } else {
            rep.ratios.push_back(to_double(rep.differences[i] / rep.differences[i - 1]));
        }
    }

    rep.monotone_decay = true;
    for (std::size_t i = 1; i < rep.differences.size(); ++i) {
        if (abs(rep.differences[i]) > abs(rep.differences[i - 1])) {
            rep.monotone_decay = false;
            ++rep.transient_violations;
        }
    }
    rep.tail_decays = rep.differences.size() < 2 ||
                      abs(rep.differences.back()) <= abs(rep.differences[rep.differences.size() - 2]);

    bool all_zero = true;
    for (const auto& d : rep.differences)
        if (d != 0) all_zero = false;
    if (all_zero) {
        rep.converged = true;
        rep.extrapolated = rep.values.back();
        return rep;
    }

    if (rep.ratios.size() >= 3) {
        double a = rep.ratios[rep.ratios.size() - 3];
        double b = rep.ratios[rep.ratios.size() - 2];
        double c = rep.ratios[rep.ratios.size() - 1];
        auto close = [](double x, double y) {
            return std::abs(x - y) <= 0.01 * std::max({std::abs(x), std::abs(y), 1e-12});
        };
        rep.converged = close(a, b) && close(b, c) && std::abs(c) < 1.0;
    }
    Rat last_diff = rep.differences.back();
    double rho = rep.ratios.empty() ? 0.0 : rep.ratios.back();
    if (rep.converged && std::abs(rho) < 1.0) {
        Rat rr(rho);
        rep.extrapolated = rep.values.back() + last_diff * rr / (1 - rr);
    } else {
        rep.extrapolated = rep.values.back();
    }
    return rep;
}

std::string diagram_name(DiagramShape s) {
    switch (s) {
        case DiagramShape::Loop: return "loop";
        case DiagramShape::Branch: return "branch";
        case DiagramShape::Bouquet1: return "bouquet1";
        case DiagramShape::Eight: return "eight";
        case DiagramShape::Tadpole: return "tadpole";
        case DiagramShape::Ell: return "ell";
        case DiagramShape::Eye: return "eye";
        case DiagramShape::Bouquet2: return "bouquet2";
    }
    return "?";
}

bool DiagramClass::consistent() const {
    if (shape == DiagramShape::Bouquet1 || shape == DiagramShape::Bouquet2) return true;
    long total = 0;
    for (int v : vertex_degrees) total += v;
    return total == 2L * edge_count;
}

DiagramClass make_diagram_class(DiagramShape s, int stratum) {
    DiagramClass c;
    c.shape = s;
    c.stratum = stratum;
    switch (s) {
        case DiagramShape::Loop: c.edge_count = 1; c.loop_count = 1; c.vertex_degrees = {2}; break;
        case DiagramShape::Branch: c.edge_count = 1; c.loop_count = 0; c.vertex_degrees = {1, 1}; break;
        case DiagramShape::Bouquet1: c.edge_count = 1; c.loop_count = 1; c.vertex_degrees = {2}; break;
        case DiagramShape::Eight: c.edge_count = 2; c.loop_count = 2; c.vertex_degrees = {4}; break;
        case DiagramShape::Tadpole: c.edge_count = 2; c.loop_count = 1; c.vertex_degrees = {3, 1}; break;
        case DiagramShape::Ell: c.edge_count = 2; c.loop_count = 0; c.vertex_degrees = {2, 1, 1}; break;
        case DiagramShape::Eye: c.edge_count = 2; c.loop_count = 0; c.vertex_degrees = {2, 2}; break;
        case DiagramShape::Bouquet2: c.edge_count = 2; c.loop_count = 2; c.vertex_degrees = {4}; break;
    }
    return c;
}

int power_count(const DiagramClass& cls, int d) {
    if (d < 1) throw std::invalid_argument("power_count: d must be positive");
    if (cls.stratum < 0 || cls.stratum > d) throw std::invalid_argument("power_count: stratum out of 0..d");
    const int l = cls.stratum;
    switch (cls.shape) {
        case DiagramShape::Bouquet1:
            // the leading stratum cancels: a (d - l) factor multiplies the sum
            if (l == d) return kVanishesIdentically;
            return l + 1 - d;
        case DiagramShape::Bouquet2:
            // the doubled-branch component dominates whenever a shift exists
            return l >= 1 ? l + 2 : 2 - d;
        default: {
            if (!cls.consistent()) throw std::invalid_argument("power_count: inconsistent degrees");
            int vertex_term = 0;
            for (int deg : cls.vertex_degrees) vertex_term += deg - 1;
            return l + cls.edge_count - d * cls.edge_count + d * vertex_term - d * cls.loop_count;
        }
    }
}

namespace {

Rat chi_tilde_spec(const ReferenceFamily& family, int n, int m, const std::vector<long>& degs) {
    return gamma_cond_exp_monomial(family, n, m, MonomialSpec{degs});
}

}  // namespace

Rat diagram_class_value(const ReferenceFamily& family, int n, int m, const DiagramClass& cls) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("diagram_class_value: Gamma family only");
    const int d = family.d();
    const int l = cls.stratum;
    if (l < 0 || l > d) throw std::invalid_argument("diagram_class_value: stratum out of 0..d");
    FineWindow window(d, m);
    Rat count(window.stratum_size(l));
    Rat c_loop = kinetic_adjacency_gamma_diagonal(family, n + m);
    Rat c_branch = kinetic_adjacency_gamma_offdiagonal(n + m);
    Rat rm = rat_pow(Rat(family.r()), m);

    switch (cls.shape) {
        case DiagramShape::Loop:
            return count * c_loop * chi_tilde_spec(family, n, m, {2}) / rm;
        case DiagramShape::Branch:
            return count * l * c_branch * chi_tilde_spec(family, n, m, {1, 1}) / rm;
        case DiagramShape::Bouquet1:
            return diagram_class_value(family, n, m, make_diagram_class(DiagramShape::Loop, l)) +
                   diagram_class_value(family, n, m, make_diagram_class(DiagramShape::Branch, l));
        case DiagramShape::Eight:
            return count * c_loop * c_loop * chi_tilde_spec(family, n, m, {4}) / (rm * rm);
        case DiagramShape::Tadpole:
            return count * l * 2 * c_loop * c_branch * chi_tilde_spec(family, n, m, {3, 1}) /
                   (rm * rm);
        case DiagramShape::Ell:
            return count * l * (l - 1) * c_branch * c_branch *
                   chi_tilde_spec(family, n, m, {2, 1, 1}) / (rm * rm);
        case DiagramShape::Eye:
            return count * l * c_branch * c_branch * chi_tilde_spec(family, n, m, {2, 2}) /
                   (rm * rm);
        case DiagramShape::Bouquet2:
            return diagram_class_value(family, n, m, make_diagram_class(DiagramShape::Eight, l)) +
                   diagram_class_value(family, n, m, make_diagram_class(DiagramShape::Tadpole, l)) +
                   diagram_class_value(family, n, m, make_diagram_class(DiagramShape::Ell, l)) +
                   diagram_class_value(family, n, m, make_diagram_class(DiagramShape::Eye, l));
    }
    return 0;
}

std::vector<DivergenceRow> divergence_scan(const ReferenceFamily& family, int n, int k,
                                           int m_lo, int m_hi) {
    if (family.d() > 2) throw std::invalid_argument("divergence_scan: d <= 2 only");
    if (k < 1 || k > 3) throw std::invalid_argument("divergence_scan: k in 1..3");
    if (m_lo < 1 || m_hi > 6 || m_lo >= m_hi) throw std::invalid_argument("divergence_scan: bad m range");

    std::vector<DiagramShape> shapes = {DiagramShape::Loop, DiagramShape::Branch,
                                        DiagramShape::Bouquet1};
    if (k >= 2) {
        shapes.insert(shapes.end(), {DiagramShape::Eight, DiagramShape::Tadpole, DiagramShape::Ell,
                                     DiagramShape::Eye, DiagramShape::Bouquet2});
    }

    std::vector<DivergenceRow> rows;
    for (DiagramShape s : shapes) {
        for (int l = 0; l <= family.d(); ++l) {
            DiagramClass cls = make_diagram_class(s, l);
            std::vector<double> logs;
            std::vector<double> values;
            bool degenerate = false;
            for (int m = m_lo; m <= m_hi; ++m) {
                double v = to_double(diagram_class_value(family, n, m, cls));
                values.push_back(v);
                if (v == 0.0) degenerate = true;
                else logs.push_back(std::log(std::abs(v)));
            }
            double slope = 0.0;
            if (!degenerate && logs.size() >= 2) {
                // least squares of log|v| against m
                double N = static_cast<double>(logs.size());
                double sx = 0, sy = 0, sxy = 0, sxx = 0;
                for (std::size_t i = 0; i < logs.size(); ++i) {
                    double x = m_lo + static_cast<double>(i);
                    sx += x; sy += logs[i]; sxy += x * logs[i]; sxx += x * x;
                }
                slope = (N * sxy - sx * sy) / (N * sxx - sx * sx);
            }
            int predicted = power_count(cls, family.d());
            std::string verdict;
            if (predicted == kVanishesIdentically) verdict = "zero";
            else if (predicted > 0) verdict = "divergent";
            else if (predicted == 0) verdict = "finite";
            else verdict = "vanishing";

            for (int m = m_lo; m <= m_hi; ++m) {
                DivergenceRow row;
                row.diagram = diagram_name(s);
                row.stratum = l;
                row.m = m;
                row.value = values[m - m_lo];
                row.fitted_slope = slope;
                row.predicted_exponent = predicted;
                row.verdict = verdict;
                row.fit_degenerate = degenerate;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

Rat bouquet1_extrapolated_value(const ReferenceFamily& family, int n, int m_hi) {
    if (m_hi < 3) throw std::invalid_argument("bouquet1_extrapolated_value: need m_hi >= 3");
    const int l = family.d() - 1;
    DiagramClass cls = make_diagram_class(DiagramShape::Bouquet1, l);
    Rat v1 = diagram_class_value(family, n, m_hi - 2, cls);
    Rat v2 = diagram_class_value(family, n, m_hi - 1, cls);
    Rat v3 = diagram_class_value(family, n, m_hi, cls);
    Rat d1 = v2 - v1, d2 = v3 - v2;
    if (d2 == 0) return v3;
    Rat rho = d2 / d1;
    return v3 + d2 * rho / (1 - rho);
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fb, double fm, double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, fm, flm, eps / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, fb, frm, eps / 2.0, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return adaptive_simpson(f, a, b, fa, fb, fm, eps, 40);
}

}  // namespace

double jensen_lower_bound(const ReferenceFamily& family, double coupling) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("jensen_lower_bound: Gamma family only");
    double alpha = to_double(family.alpha0());
    double beta = to_double(family.beta0());
    double lg = std::lgamma(alpha);
    // E over the base marginal of exp(-coupling x^2); the base-level mass
    // Lagrangian is exactly x^2.
    if (alpha >= 1.0) {
        auto f = [&](double x) {
            if (x <= 0.0) return 0.0;
            return std::exp(-coupling * x * x + alpha * std::log(beta) +
                            (alpha - 1.0) * std::log(x) - beta * x - lg);
        };
        double hi = 60.0 / beta + 10.0;
        return integrate(f, 0.0, hi, 1e-12);
    }
    // substitute x = u^{1/alpha}: the integrand becomes bounded near zero
    double front = std::exp(alpha * std::log(beta) - lg) / alpha;
    auto g = [&](double u) {
        if (u <= 0.0) return front;
        double x = std::pow(u, 1.0 / alpha);
        return front * std::exp(-coupling * x * x - beta * x);
    };
    double hi = std::pow(60.0 / beta + 10.0, alpha);
    return integrate(g, 0.0, hi, 1e-12);
}

JensenReport jensen_bounds_check(const ReferenceFamily& family, int n, std::size_t samples,
                                 std::uint64_t seed, double coupling) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("jensen_bounds_check: Gamma family only");
    if (samples < 100) throw std::invalid_argument("jensen_bounds_check: too few samples");
    JensenReport rep;
    rep.lower = jensen_lower_bound(family, coupling);

    const long sites = int_pow(Int(family.r()), n).convert_to<long>();
    const double c = to_double(mass_lren_coefficient(family, n));
    const double norm = 1.0 / static_cast<double>(sites);
    std::mt19937_64 eng(seed);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        double lag = 0.0;
        for (long i = 0; i < sites; ++i) {
            double x = family.draw(n, eng);
            lag += c * x * x;
        }
        lag *= norm;
        double v = std::exp(-coupling * lag);
        double delta = v - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (v - mean);
    }
    rep.estimate = mean;
    rep.std_error = std::sqrt(m2 / (static_cast<double>(samples) - 1.0) /
                              static_cast<double>(samples));
    rep.bounds_hold = rep.estimate > rep.lower - 5.0 * rep.std_error && rep.estimate < 1.0;
    if (coupling == 0.0) rep.bounds_hold = rep.estimate == 1.0;
    return rep;
}

}  // namespace levylat
