#include <levylat/mc.hpp>

#include <levylat/condexp.hpp>
#include <levylat/effective.hpp>
#include <levylat/wick.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace levylat {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

FieldSampler::FieldSampler(ReferenceFamily family, int n, int m)
    : family_(std::move(family)), n_(n), m_(m) {
    if (n < 0 || m < 1) throw std::invalid_argument("FieldSampler: need n >= 0, m >= 1");
    LatticeConfig cfg(family_.d());
    fine_count_ = cfg.cells(n + m);
    coarse_count_ = cfg.cells(n);
    const long fine_side = cfg.side(n + m);
    const long coarse_side = cfg.side(n);
    cell_.resize(fine_count_);
    for (long id = 0; id < fine_count_; ++id) {
        long rem = id, cid = 0;
        std::vector<long> coords(family_.d(), 0);
        for (int l = family_.d() - 1; l >= 0; --l) {
            coords[l] = rem % fine_side;
            rem /= fine_side;
        }
        for (int l = 0; l < family_.d(); ++l) cid = cid * coarse_side + (coords[l] >> m);
        cell_[id] = cid;
    }
}

long FieldSampler::cell_of_fine(long fine_id) const { return cell_.at(fine_id); }

FieldSample FieldSampler::draw(std::mt19937_64& eng) const {
    FieldSample s;
    s.fine.resize(fine_count_);
    for (auto& x : s.fine) x = family_.draw(n_ + m_, eng);
    s.coarse.assign(coarse_count_, 0.0);
    for (long i = 0; i < fine_count_; ++i) s.coarse[cell_[i]] += s.fine[i];
    const double block = static_cast<double>(fine_count_ / coarse_count_);
    for (auto& x : s.coarse) x /= block;
    return s;
}

std::vector<std::pair<std::string, SitePolynomial>> standard_test_functions(long coarse_count) {
    std::vector<std::pair<std::string, SitePolynomial>> out;
    out.emplace_back("1", SitePolynomial::constant(1));
    out.emplace_back("x0", SitePolynomial::variable(0, 1));
    out.emplace_back("x0^2", SitePolynomial::variable(0, 2));
    SitePolynomial sumsq;
    for (long i = 0; i < coarse_count; ++i) sumsq += SitePolynomial::variable(static_cast<int>(i), 2);
    out.emplace_back("sum_x^2", sumsq);
    return out;
}

namespace {

struct Accumulator {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;
    void push(double v) {
        ++n;
        double delta = v - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (v - mean);
    }
    void merge(const Accumulator& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        double delta = o.mean - mean;
        std::size_t total = n + o.n;
        mean += delta * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) /
                         static_cast<double>(total);
        n = total;
    }
};

}  // namespace

std::vector<WeakTestReport> run_weak_test(const WeakIdentity& identity, std::size_t count,
                                          std::uint64_t seed, double z_threshold, int workers) {
    if (count < 2) throw std::invalid_argument("run_weak_test: count too small");
    if (workers < 1) throw std::invalid_argument("run_weak_test: workers must be >= 1");
    FieldSampler sampler(identity.family, identity.n, identity.m);
    auto test_fns = standard_test_functions(sampler.coarse_count());
    const std::size_t nfn = test_fns.size();

    // per-worker accumulators, merged in worker order
    std::vector<std::vector<Accumulator>> acc(workers, std::vector<Accumulator>(nfn));
    auto run_worker = [&](int w) {
        std::mt19937_64 eng(splitmix64(seed ^ (0xabcdef1234567890ULL + 0x1000003ULL * w)));
        std::size_t lo = count * w / workers;
        std::size_t hi = count * (w + 1) / workers;
        for (std::size_t s = lo; s < hi; ++s) {
            FieldSample sample = sampler.draw(eng);
            double f = identity.observable(sample);
            for (std::size_t j = 0; j < nfn; ++j)
                acc[w][j].push(f * test_fns[j].second.evaluate(sample.coarse));
        }
    };
    if (workers == 1) {
        run_worker(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run_worker, w);
        for (auto& t : pool) t.join();
    }

    auto moment_fn = [&](int site, int power) {
        (void)site;
        return identity.family.moment(identity.n, power);
    };

    std::vector<WeakTestReport> out;
    for (std::size_t j = 0; j < nfn; ++j) {
        Accumulator total;
        for (int w = 0; w < workers; ++w) total.merge(acc[w][j]);
        WeakTestReport rep;
        rep.identity = identity.name;
        rep.test_function = test_fns[j].first;
        rep.estimate = total.mean;
        rep.reference = to_double((identity.reference * test_fns[j].second).expect(moment_fn));
        rep.std_error =
            std::sqrt(total.m2 / (static_cast<double>(total.n) - 1.0) / static_cast<double>(total.n));
        if (rep.std_error == 0.0) {
            rep.z = (rep.estimate == rep.reference) ? 0.0 : 1e300;
        } else {
            rep.z = std::abs(rep.estimate - rep.reference) / rep.std_error;
        }
        rep.pass = rep.z < z_threshold;
        rep.count = count;
        rep.seed = seed;
        rep.workers = workers;
        out.push_back(std::move(rep));
    }
    return out;
}

namespace {

SitePolynomial lift_univariate(const Polynomial& p, int site) {
    SitePolynomial out;
    for (int deg = 0; deg <= p.degree(); ++deg) {
        if (p.coeff(deg) == 0) continue;
        SiteMonomial m;
        if (deg > 0) m[site] = deg;
        out += SitePolynomial::monomial(std::move(m), p.coeff(deg));
    }
    return out;
}

}  // namespace

std::vector<WeakIdentity> standard_weak_identities(const ReferenceFamily& family) {
    const int n = 0, m = 1;
    std::vector<WeakIdentity> out;
    const bool gamma = family.kind() == FamilyKind::Gamma;

    auto add = [&](std::string name, std::function<double(const FieldSample&)> obs,
                   SitePolynomial ref) {
        out.push_back({std::move(name), family, n, m, std::move(obs), std::move(ref)});
    };

    // conditional powers of one fine value
    for (int k = 1; k <= 3; ++k) {
        add("cond_pow_k" + std::to_string(k),
            [k](const FieldSample& s) { return std::pow(s.fine[0], k); },
            lift_univariate(cond_exp_power(family, n, m, k), 0));
    }

    // product of two children of the same cell
    add("cell_pair", [](const FieldSample& s) { return s.fine[0] * s.fine[1]; },
        lift_univariate(cell_monomial_expectation(family, n, m, {1, 1}), 0));

    // centered cross term
    add("cross_yy",
        [](const FieldSample& s) {
            return (s.fine[0] - s.coarse[0]) * (s.fine[1] - s.coarse[0]);
        },
        lift_univariate(cross_moment_yy(family, n, m), 0));

    // renormalized-polynomial martingale at degree 2
    {
        Polynomial fine_wick = gamma ? wick_gamma(family, n + m, 2).poly
                                     : wick_gaussian(family, n + m, 2).poly;
        add("wick_martingale_k2",
            [fine_wick](const FieldSample& s) { return fine_wick(s.fine[0]); },
            lift_univariate(gamma ? wick_gamma(family, n, 2).poly
                                  : wick_gaussian(family, n, 2).poly,
                            0));
    }

    // kinetic energy of the refined field against its exact conditional form
    {
        const int d = family.d();
        add("kinetic_cond_exp",
            [d, n, m](const FieldSample& s) { return t_app(d, n + m, s.fine); },
            brute_force_kinetic_cond_exp(family, n, m));
    }

    // block-average closure: sampled coarse marginal vs closed-form moments
    for (int k = 1; k <= 3; ++k) {
        add("coarse_closure_k" + std::to_string(k),
            [k](const FieldSample& s) { return std::pow(s.coarse[0], k); },
            SitePolynomial::variable(0, k));
    }

    return out;
}

std::vector<WeakTestReport> mc_cumulants(const ReferenceFamily& family, int n, int m,
                                         int max_order, std::size_t count, std::uint64_t seed,
                                         double z_threshold, int workers) {
    if (family.kind() != FamilyKind::Gamma)
        throw std::domain_error("mc_cumulants: Gamma mass case only");
    if (max_order < 1 || max_order > 3) throw std::invalid_argument("mc_cumulants: order in 1..3");

    LatticeConfig cfg(family.d());
    FieldSampler sampler(family, n, m);
    QuadraticForm lagrangian = mass_lren(family, n + m, cfg.cells(n + m));
    GammaGraphContext ctx{family, n, m,
                          [&sampler](long site) { return sampler.cell_of_fine(site); }};

    std::vector<SitePolynomial> cumulants(max_order + 1);
    for (int k = 1; k <= max_order; ++k) cumulants[k] = lagrangian_cumulant(ctx, lagrangian, k);

    std::vector<WeakTestReport> out;
    for (int k = 1; k <= max_order; ++k) {
        // moment reconstruction: E[L | .] = K1; E[L^2 | .] = K2 + K1^2;
        // E[L^3 | .] = K3 + 3 K2 K1 + K1^3
        SitePolynomial recon;
        if (k == 1) recon = cumulants[1];
        if (k == 2) recon = cumulants[2] + cumulants[1] * cumulants[1];
        if (k == 3)
            recon = cumulants[3] + (cumulants[2] * cumulants[1]) * Rat(3) +
                    cumulants[1] * cumulants[1] * cumulants[1];

        WeakIdentity ident{
            "mass_moment_k" + std::to_string(k), family, n, m,
            [lagrangian, k](const FieldSample& s) {
                return std::pow(lagrangian.evaluate(s.fine), k);
            },
            recon};
        auto reports = run_weak_test(ident, count, seed + static_cast<std::uint64_t>(k),
                                     z_threshold, workers);
        out.insert(out.end(), reports.begin(), reports.end());
    }
    return out;
}

std::vector<ConditioningBin> conditioning_bins(const ReferenceFamily& family, int n, int m,
                                               int order, int bins, std::size_t count,
                                               std::uint64_t seed) {
    if (bins < 2) throw std::invalid_argument("conditioning_bins: need at least 2 bins");
    LatticeConfig cfg(family.d());
    FieldSampler sampler(family, n, m);
    QuadraticForm lagrangian = mass_lren(family, n + m, cfg.cells(n + m));
    GammaGraphContext ctx{family, n, m,
                          [&sampler](long site) { return sampler.cell_of_fine(site); }};
    SitePolynomial recon;
    std::vector<SitePolynomial> cumulants(order + 1);
    for (int k = 1; k <= order; ++k) cumulants[k] = lagrangian_cumulant(ctx, lagrangian, k);
    if (order == 1) recon = cumulants[1];
    if (order == 2) recon = cumulants[2] + cumulants[1] * cumulants[1];
    if (order == 3)
        recon = cumulants[3] + (cumulants[2] * cumulants[1]) * Rat(3) +
                cumulants[1] * cumulants[1] * cumulants[1];

    std::mt19937_64 eng(splitmix64(seed));
    std::vector<std::pair<double, double>> draws;  // (coarse value, L^order)
    draws.reserve(count);
    for (std::size_t s = 0; s < count; ++s) {
        FieldSample sample = sampler.draw(eng);
        draws.emplace_back(sample.coarse[0], std::pow(lagrangian.evaluate(sample.fine), order));
    }
    std::sort(draws.begin(), draws.end());

    std::vector<ConditioningBin> out;
    std::size_t per = count / bins;
    for (int b = 0; b < bins; ++b) {
        std::size_t lo = b * per;
        std::size_t hi = (b == bins - 1) ? count : lo + per;
        if (lo >= hi) continue;
        ConditioningBin bin;
        bin.x_lo = draws[lo].first;
        bin.x_hi = draws[hi - 1].first;
        bin.count = hi - lo;
        double sx = 0.0, sv = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            sx += draws[i].first;
            sv += draws[i].second;
        }
        bin.x_mean = sx / static_cast<double>(bin.count);
        bin.observed = sv / static_cast<double>(bin.count);
        std::vector<double> coarse_point(sampler.coarse_count(), bin.x_mean);
        bin.predicted = recon.evaluate(coarse_point);
        out.push_back(bin);
    }
    return out;
}

}  // namespace levylat
