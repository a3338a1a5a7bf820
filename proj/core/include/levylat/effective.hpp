#pragma once

#include <levylat/graphs.hpp>
#include <levylat/kinetic.hpp>
#include <levylat/rational.hpp>
#include <levylat/reference.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace levylat {

/// Set-partition and integer-partition counts up to k.
struct PartitionCombinatorics {
    int k = 0;
    std::vector<Int> stirling;       // {k choose-into l blocks}, index l = 0..k
    Int bell;                        // sum of the Stirling row
    Int integer_partitions;          // p(k)
    Int fubini;                      // sum of l! * stirling[l]
    double bell_vs_integer_gap;      // |bell - p(k)| / p(k); the two differ from k = 3 on
};
PartitionCombinatorics partition_numbers(int k);

/// Hardy-Ramanujan growth estimate for p(k).
double integer_partition_asymptotic(int k);
/// Ordered-set-partition growth estimate k!/(2 (log 2)^{k+1}).
double fubini_asymptotic(int k);

/// Mass-perturbation Lagrangian at level n: diagonal form with per-site
/// coefficient (alpha_0 + 1)/(alpha_0 + r^n), acting on the given sites.
QuadraticForm mass_lren(const ReferenceFamily& family, int n, long site_count);
Rat mass_lren_coefficient(const ReferenceFamily& family, int n);

/// Per-site order-k coefficient of the effective density between levels n and
/// n+m for the mass case: the grouped sum over placements of k loops on the
/// r^m children of one cell, multinomial weights, exact rational.
Rat bouquet_sum(const ReferenceFamily& family, int n, int m, int k);

/// The placement factor I_{m,l} and its m -> infinity limit (the Stirling number).
Rat placement_factor(const ReferenceFamily& family, int m, int k, int l);

struct LimitReport {
    std::vector<Rat> values;       // index m-1 for m = 1..m_max
    std::vector<Rat> differences;  // successive differences
    std::vector<double> ratios;    // difference ratios
    Rat extrapolated;              // geometric-tail extrapolation
    bool converged = false;        // three consecutive ratios agree within 1%
    bool monotone_decay = false;   // |differences| nonincreasing over every pair
    int transient_violations = 0;  // adjacent pairs where |difference| grew
    bool tail_decays = false;      // the final pair decays
};
/// Sequence of bouquet sums in m with geometric extrapolation. The deeper end
/// of the sequence (m up to 8) exists for limit diagnostics; coefficients at
/// small m can sit on structural zeros or cross zero once before the
/// geometric tail takes over, which the transient fields record.
LimitReport mass_coefficient_limit(const ReferenceFamily& family, int n, int k, int m_max);

/// Envelope implied by the combinatorial bound on the limit: Bell(k) placements
/// times the k!/(2 (log 2)^{k+1}) partition-sum bound times the per-graph scale.
double mass_limit_envelope(const ReferenceFamily& family, int n, int k);

/// Fine-level diagram shapes relative to a source site and its shift maps.
enum class DiagramShape {
    Loop,      // single loop at the source
    Branch,    // single edge from the source along one shift
    Bouquet1,  // loop plus all branches at the source (leading terms cancel)
    Eight,     // double loop at the source
    Tadpole,   // loop at the source plus one branch
    Ell,       // two branches to distinct shift targets
    Eye,       // doubled branch edge
    Bouquet2,  // full square of (loop + branches) at the source
};
std::string diagram_name(DiagramShape s);

struct DiagramClass {
    DiagramShape shape = DiagramShape::Loop;
    int stratum = 0;                 // l, number of available shifts at the source
    int edge_count = 0;
    int loop_count = 0;
    std::vector<int> vertex_degrees; // endpoints with multiplicity, loops twice
    bool consistent() const;         // degree bookkeeping matches the edge multiset
};
DiagramClass make_diagram_class(DiagramShape s, int stratum);

/// Sentinel for class values that cancel identically (no scaling exponent).
inline constexpr int kVanishesIdentically = -1000000;

/// Scaling exponent a of the class contribution ~ 2^{a m}: positive diverges,
/// zero is finite, negative vanishes. Composite bouquet shapes carry their
/// internal cancellation (the leading stratum term drops).
int power_count(const DiagramClass& cls, int d);

/// Exact value of the class contribution to the order-k density coefficient at
/// refinement depth m (per coarse site, Gamma kinetic adjacency).
Rat diagram_class_value(const ReferenceFamily& family, int n, int m, const DiagramClass& cls);

struct DivergenceRow {
    std::string diagram;
    int stratum = 0;
    int m = 0;
    double value = 0.0;
    double fitted_slope = 0.0;     // log2 |value| per unit m, least squares
    int predicted_exponent = 0;
    std::string verdict;           // divergent / finite / vanishing
    bool fit_degenerate = false;
};
/// Evaluate every hard-coded class over the m range and compare fitted growth
/// against the counting rules.
std::vector<DivergenceRow> divergence_scan(const ReferenceFamily& family, int n, int k,
                                           int m_lo, int m_hi);

/// Geometric extrapolation of the Bouquet1 value at stratum d-1; reproduces
/// the renormalized-kinetic diagonal coefficient.
Rat bouquet1_extrapolated_value(const ReferenceFamily& family, int n, int m_hi);

struct JensenReport {
    double lower = 0.0;      // quadrature bound through the level-0 density
    double estimate = 0.0;   // Monte Carlo estimate of E[exp(-L)]
    double upper = 1.0;
    double std_error = 0.0;
    bool bounds_hold = false;
};
/// Monte Carlo check that E[exp(-coupling * L_mass^n)] sits inside the
/// convexity bounds. coupling = 0 gives exactly 1.
JensenReport jensen_bounds_check(const ReferenceFamily& family, int n, std::size_t samples,
                                 std::uint64_t seed, double coupling = 1.0);

/// Adaptive Simpson integral of exp(-coupling x^2) against the level-0 density.
double jensen_lower_bound(const ReferenceFamily& family, double coupling = 1.0);

}  // namespace levylat
