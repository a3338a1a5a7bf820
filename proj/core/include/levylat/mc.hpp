#pragma once

#include <levylat/graphs.hpp>
#include <levylat/kinetic.hpp>
#include <levylat/polynomial.hpp>
#include <levylat/reference.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace levylat {

/// One draw of the resolution process between levels n and n+m: iid finest
/// values per fine site, coarse values as exact block means.
struct FieldSample {
    std::vector<double> fine;    // level n+m, lexicographic coordinate order
    std::vector<double> coarse;  // level n
};

/// Deterministic per (seed, worker); the cell map follows the coordinate order
/// used across the geometry code.
class FieldSampler {
  public:
    FieldSampler(ReferenceFamily family, int n, int m);

    long fine_count() const { return fine_count_; }
    long coarse_count() const { return coarse_count_; }
    long cell_of_fine(long fine_id) const;

    FieldSample draw(std::mt19937_64& eng) const;

  private:
    ReferenceFamily family_;
    int n_;
    int m_;
    long fine_count_;
    long coarse_count_;
    std::vector<long> cell_;  // fine id -> coarse id
};

/// A closed-form claim E[F(fine) | coarse] = reference(coarse), tested weakly:
/// E[F * H(coarse)] must match the exact E[reference * H] for each registered
/// test function H.
struct WeakIdentity {
    std::string name;
    ReferenceFamily family;
    int n = 0;
    int m = 1;
    std::function<double(const FieldSample&)> observable;
    SitePolynomial reference;  // polynomial over the coarse sites
};

struct WeakTestReport {
    std::string identity;
    std::string test_function;
    double estimate = 0.0;
    double reference = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    bool pass = false;
    std::size_t count = 0;
    std::uint64_t seed = 0;
    int workers = 1;
};

/// The fixed test-function basis 1, x_0, x_0^2, sum_i x_i^2 over the coarse sites.
std::vector<std::pair<std::string, SitePolynomial>> standard_test_functions(long coarse_count);

/// Weak test against every H in the basis. The reference expectation is exact
/// (product measure, closed-form moments); estimates partition the sample
/// budget across the declared workers with per-worker seed streams.
std::vector<WeakTestReport> run_weak_test(const WeakIdentity& identity, std::size_t count,
                                          std::uint64_t seed, double z_threshold = 5.0,
                                          int workers = 1);

/// The registered closed-form identities for one family's standard setup
/// (d = 1, n = 0, m = 1; Gamma alpha0 = beta0 = 1 or Gaussian sigma0 = 1).
std::vector<WeakIdentity> standard_weak_identities(const ReferenceFamily& family);

/// Weak comparison of conditional Lagrangian moments against the cumulant
/// reconstruction for the mass Lagrangian: E[L^k H] vs E[(sum over partitions
/// of products of cumulants) H], k <= 3.
std::vector<WeakTestReport> mc_cumulants(const ReferenceFamily& family, int n, int m,
                                         int max_order, std::size_t count, std::uint64_t seed,
                                         double z_threshold = 5.0, int workers = 1);

/// Secondary visual diagnostic: per-bin conditional means of L^k against the
/// closed-form cumulant polynomial, binned on the first coarse value.
struct ConditioningBin {
    double x_lo = 0.0, x_hi = 0.0, x_mean = 0.0;
    double observed = 0.0;
    double predicted = 0.0;
    std::size_t count = 0;
};
std::vector<ConditioningBin> conditioning_bins(const ReferenceFamily& family, int n, int m,
                                               int order, int bins, std::size_t count,
                                               std::uint64_t seed);

}  // namespace levylat
