#pragma once

#include <levylat/kinetic.hpp>
#include <levylat/polynomial.hpp>
#include <levylat/rational.hpp>
#include <levylat/reference.hpp>

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace levylat {

/// Unordered pair of sites; loops allowed. Canonical endpoint order.
struct GraphEdge {
    long a = 0;
    long b = 0;
    GraphEdge() = default;
    GraphEdge(long x, long y) : a(std::min(x, y)), b(std::max(x, y)) {}
    bool is_loop() const { return a == b; }
    bool operator<(const GraphEdge& o) const { return std::tie(a, b) < std::tie(o.a, o.b); }
    bool operator==(const GraphEdge& o) const { return a == o.a && b == o.b; }
};

/// Multiset of edges; the commutative product is multiset union and the size
/// grades the semigroup.
class MultiGraph {
  public:
    MultiGraph() = default;
    explicit MultiGraph(const std::vector<GraphEdge>& edges);

    const std::map<GraphEdge, long>& edges() const { return mult_; }
    long size() const { return size_; }
    bool empty() const { return size_ == 0; }

    MultiGraph& multiply(const GraphEdge& e, long count = 1);
    MultiGraph operator*(const MultiGraph& o) const;
    /// Multiset difference; throws unless o divides *this.
    MultiGraph operator/(const MultiGraph& o) const;
    bool divides(const MultiGraph& o) const;  // *this <= o as multisets

    bool operator<(const MultiGraph& o) const { return mult_ < o.mult_; }
    bool operator==(const MultiGraph& o) const { return mult_ == o.mult_; }

    /// Ordered-tuple multiplicity k! / prod (edge multiplicities)!.
    Int ordering_weight() const;

    std::vector<long> support_sites() const;
    /// Site id -> number of incident edge endpoints (loops count twice).
    std::map<long, long> degrees() const;

    std::string key() const;  // canonical encoding for memo tables

  private:
    std::map<GraphEdge, long> mult_;
    long size_ = 0;
};

using CellMap = std::function<long(long site)>;

MultiGraph coarse(const MultiGraph& g, const CellMap& cell_of);
bool is_coarsely_connected(const MultiGraph& g, const CellMap& cell_of);

/// Every partition of the edge multiset, each exactly once, canonical order.
/// Size capped at 8 edges (Bell growth).
std::vector<std::vector<MultiGraph>> multiset_partitions(const MultiGraph& g);

/// Scalar-times-monomial over the coarse sites; the exponent profile is the
/// coarse degree profile of the graph.
struct ChiValue {
    Rat coeff;
    SiteMonomial exponents;

    SitePolynomial as_polynomial() const { return SitePolynomial::monomial(exponents, coeff); }
    bool operator==(const ChiValue& o) const { return coeff == o.coeff && exponents == o.exponents; }
};

/// Evaluation context: Gamma reference between levels n and n+m with a cell map.
struct GammaGraphContext {
    ReferenceFamily family;  // must be the Gamma family
    int n = 0;
    int m = 1;
    CellMap cell_of;
};

/// chi(g) = E[product of edge variables | coarse field]; factorizes over
/// coarse cells into closed-form monomial coefficients. Gamma only.
ChiValue chi(const GammaGraphContext& ctx, const MultiGraph& g);

/// Connected (cumulant) value: direct signed sum over partitions and the
/// edge-anchored recursion, computed both ways and compared exactly.
ChiValue chi_connected(const GammaGraphContext& ctx, const MultiGraph& g);

/// chi(g) rebuilt from connected values over all partitions; exact equality.
bool moment_cumulant_roundtrip(const GammaGraphContext& ctx, const MultiGraph& g);

/// Order-k conditional cumulant of the quadratic Lagrangian built on the
/// level-(n+m) sites: (1/r^{k(n+m)}) sum over coarsely connected k-edge
/// multisets of ordering weight * coefficient product * chi_connected.
SitePolynomial lagrangian_cumulant(const GammaGraphContext& ctx, const QuadraticForm& lagrangian,
                                   int k);

/// E[L^k | coarse] assembled directly from chi (no connectedness filter).
SitePolynomial lagrangian_moment(const GammaGraphContext& ctx, const QuadraticForm& lagrangian,
                                 int k);

}  // namespace levylat
