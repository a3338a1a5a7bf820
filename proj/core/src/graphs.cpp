#include <levylat/graphs.hpp>

#include <levylat/condexp.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace levylat {

namespace {
constexpr long kPartitionCap = 8;
}

MultiGraph::MultiGraph(const std::vector<GraphEdge>& edges) {
    for (const auto& e : edges) multiply(e);
}

MultiGraph& MultiGraph::multiply(const GraphEdge& e, long count) {
    if (count < 0) throw std::invalid_argument("MultiGraph::multiply: negative count");
    if (count == 0) return *this;
    mult_[e] += count;
    size_ += count;
    return *this;
}

MultiGraph MultiGraph::operator*(const MultiGraph& o) const {
    MultiGraph out = *this;
    for (const auto& [e, c] : o.mult_) out.multiply(e, c);
    return out;
}

bool MultiGraph::divides(const MultiGraph& o) const {
    for (const auto& [e, c] : mult_) {
        auto it = o.mult_.find(e);
        if (it == o.mult_.end() || it->second < c) return false;
    }
    return true;
}

MultiGraph MultiGraph::operator/(const MultiGraph& o) const {
    if (!o.divides(*this)) throw std::invalid_argument("MultiGraph::operator/: not a factor");
    MultiGraph out;
    for (const auto& [e, c] : mult_) {
        auto it = o.mult_.find(e);
        long rem = c - (it == o.mult_.end() ? 0 : it->second);
        if (rem > 0) out.multiply(e, rem);
    }
    return out;
}

Int MultiGraph::ordering_weight() const {
    Int w = factorial(size_);
    for (const auto& [e, c] : mult_) w /= factorial(c);
    return w;
}

std::vector<long> MultiGraph::support_sites() const {
    std::set<long> s;
    for (const auto& [e, c] : mult_) {
        s.insert(e.a);
        s.insert(e.b);
    }
    return {s.begin(), s.end()};
}

std::map<long, long> MultiGraph::degrees() const {
    std::map<long, long> deg;
    for (const auto& [e, c] : mult_) {
        deg[e.a] += c;
        deg[e.b] += c;
    }
    return deg;
}

std::string MultiGraph::key() const {
    std::ostringstream os;
    for (const auto& [e, c] : mult_) os << e.a << "," << e.b << ":" << c << ";";
    return os.str();
}

MultiGraph coarse(const MultiGraph& g, const CellMap& cell_of) {
    MultiGraph out;
    for (const auto& [e, c] : g.edges()) out.multiply(GraphEdge(cell_of(e.a), cell_of(e.b)), c);
    return out;
}

bool is_coarsely_connected(const MultiGraph& g, const CellMap& cell_of) {
    MultiGraph cg = coarse(g, cell_of);
    auto sites = cg.support_sites();
    if (sites.size() <= 1) return true;
    std::map<long, long> parent;
    std::function<long(long)> find = [&](long x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (long s : sites) parent[s] = s;
    for (const auto& [e, c] : cg.edges()) {
        long ra = find(e.a), rb = find(e.b);
        if (ra != rb) parent[ra] = rb;
    }
    long root = find(sites.front());
    for (long s : sites)
        if (find(s) != root) return false;
    return true;
}

std::vector<std::vector<MultiGraph>> multiset_partitions(const MultiGraph& g) {
    if (g.size() > kPartitionCap)
        throw std::invalid_argument("multiset_partitions: size cap (8 edges) exceeded");
    // Enumerate set partitions of the edge positions, then canonicalize and
    // de-duplicate; at the cap this is at most Bell(8) = 4140 candidates.
    std::vector<GraphEdge> pos;
    for (const auto& [e, c] : g.edges())
        for (long i = 0; i < c; ++i) pos.push_back(e);
    const std::size_t k = pos.size();

    std::set<std::vector<MultiGraph>> unique;
    std::vector<int> assign(k, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int nblocks) {
        if (idx == k) {
            std::vector<MultiGraph> parts(nblocks);
            for (std::size_t i = 0; i < k; ++i) parts[assign[i]].multiply(pos[i]);
            std::sort(parts.begin(), parts.end());
            unique.insert(std::move(parts));
            return;
        }
        for (int b = 0; b <= nblocks; ++b) {
            assign[idx] = b;
            rec(idx + 1, std::max(nblocks, b + 1));
        }
    };
    if (k == 0) return {{}};
    rec(0, 0);
    return {unique.begin(), unique.end()};
}

namespace {

void require_gamma(const GammaGraphContext& ctx) {
    if (ctx.family.kind() != FamilyKind::Gamma)
        throw std::domain_error("graph cumulant calculus: closed monomial form needs the Gamma family");
}

}  // namespace

ChiValue chi(const GammaGraphContext& ctx, const MultiGraph& g) {
    require_gamma(ctx);
    ChiValue out;
    out.coeff = 1;
    if (g.empty()) return out;

    // group fine degrees by coarse cell
    std::map<long, std::vector<long>> cell_degrees;
    std::map<long, long> cell_total;
    for (const auto& [site, deg] : g.degrees()) {
        long cell = ctx.cell_of(site);
        cell_degrees[cell].push_back(deg);
        cell_total[cell] += deg;
    }
    for (auto& [cell, degs] : cell_degrees) {
        MonomialSpec spec{degs};
        out.coeff *= gamma_cond_exp_monomial(ctx.family, ctx.n, ctx.m, spec);
        out.exponents[static_cast<int>(cell)] = static_cast<int>(cell_total[cell]);
    }
    return out;
}

namespace {

Rat chi_tilde(const GammaGraphContext& ctx, const MultiGraph& g,
              std::map<std::string, Rat>& memo_chi) {
    auto it = memo_chi.find(g.key());
    if (it != memo_chi.end()) return it->second;
    Rat v = chi(ctx, g).coeff;
    memo_chi.emplace(g.key(), v);
    return v;
}

// Sum over set partitions of the edge positions (copies of a repeated edge are
// distinguishable here; a block pattern recurs once per labelled realization).
Rat partition_sum(const MultiGraph& g, const std::function<Rat(long p)>& prefactor,
                  const std::function<Rat(const MultiGraph&)>& block_value) {
    if (g.size() > kPartitionCap)
        throw std::invalid_argument("partition sum: size cap (8 edges) exceeded");
    std::vector<GraphEdge> pos;
    for (const auto& [e, c] : g.edges())
        for (long i = 0; i < c; ++i) pos.push_back(e);
    const std::size_t k = pos.size();

    Rat acc = 0;
    std::vector<int> assign(k, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int nblocks) {
        if (idx == k) {
            std::vector<MultiGraph> blocks(nblocks);
            for (std::size_t i = 0; i < k; ++i) blocks[assign[i]].multiply(pos[i]);
            Rat term = prefactor(nblocks);
            for (const auto& b : blocks) term *= block_value(b);
            acc += term;
            return;
        }
        for (int b = 0; b <= nblocks; ++b) {
            assign[idx] = b;
            rec(idx + 1, std::max(nblocks, b + 1));
        }
    };
    if (k == 0) return prefactor(0);
    rec(0, 0);
    return acc;
}

Rat chi_c_direct(const GammaGraphContext& ctx, const MultiGraph& g,
                 std::map<std::string, Rat>& memo_chi) {
    return partition_sum(
        g, [](long p) { return (p % 2 == 1) ? Rat(factorial(p - 1)) : -Rat(factorial(p - 1)); },
        [&](const MultiGraph& b) { return chi_tilde(ctx, b, memo_chi); });
}

// Enumerate the sub-multigraphs h with anchor <= h < g (proper, containing the
// anchor edge at least once), together with the number of labelled position
// choices realizing h when one anchor position is pinned:
// C(mult_g(anchor)-1, mult_h(anchor)-1) * prod_{e != anchor} C(mult_g(e), mult_h(e)).
void enumerate_anchored_factors(const MultiGraph& g, const GraphEdge& anchor,
                                std::vector<std::pair<MultiGraph, Int>>& out) {
    std::vector<std::pair<GraphEdge, long>> edges(g.edges().begin(), g.edges().end());
    std::vector<long> take(edges.size(), 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == edges.size()) {
            MultiGraph h;
            Int ways = 1;
            bool has_anchor = false;
            for (std::size_t j = 0; j < edges.size(); ++j) {
                h.multiply(edges[j].first, take[j]);
                if (edges[j].first == anchor) {
                    if (take[j] == 0) return;
                    has_anchor = true;
                    ways *= binomial(Int(edges[j].second - 1), take[j] - 1);
                } else {
                    ways *= binomial(Int(edges[j].second), take[j]);
                }
            }
            if (!has_anchor || h.size() == 0 || h.size() == g.size()) return;
            out.emplace_back(std::move(h), std::move(ways));
        }
        else {
            for (long c = 0; c <= edges[i].second; ++c) {
                take[i] = c;
                rec(i + 1);
            }
        }
    };
    rec(0);
}

Rat chi_c_recursive(const GammaGraphContext& ctx, const MultiGraph& g,
                    std::map<std::string, Rat>& memo_chi, std::map<std::string, Rat>& memo_cc) {
    auto it = memo_cc.find(g.key());
    if (it != memo_cc.end()) return it->second;
    Rat value;
    if (g.size() <= 1) {
        value = chi_tilde(ctx, g, memo_chi);
    } else {
        GraphEdge anchor = g.edges().begin()->first;
        value = chi_tilde(ctx, g, memo_chi);
        std::vector<std::pair<MultiGraph, Int>> factors;
        enumerate_anchored_factors(g, anchor, factors);
        for (const auto& [h, ways] : factors)
            value -= Rat(ways) * chi_c_recursive(ctx, h, memo_chi, memo_cc) *
                     chi_tilde(ctx, g / h, memo_chi);
    }
    memo_cc.emplace(g.key(), value);
    return value;
}

}  // namespace

ChiValue chi_connected(const GammaGraphContext& ctx, const MultiGraph& g) {
    require_gamma(ctx);
    std::map<std::string, Rat> memo_chi, memo_cc;
    Rat direct = chi_c_direct(ctx, g, memo_chi);
    Rat recursive = chi_c_recursive(ctx, g, memo_chi, memo_cc);
    if (direct != recursive)
        throw std::logic_error("chi_connected: partition sum and recursion disagree");
    ChiValue out = chi(ctx, g);
    out.coeff = direct;
    return out;
}

bool moment_cumulant_roundtrip(const GammaGraphContext& ctx, const MultiGraph& g) {
    std::map<std::string, Rat> memo_chi, memo_cc;
    Rat rebuilt = partition_sum(
        g, [](long) { return Rat(1); },
        [&](const MultiGraph& b) { return chi_c_recursive(ctx, b, memo_chi, memo_cc); });
    return rebuilt == chi(ctx, g).coeff;
}

namespace {

// Multisets of k edges drawn from the support of the form, with the product of
// form coefficients attached.
void enumerate_edge_multisets(const std::vector<std::pair<GraphEdge, Rat>>& support, int k,
                              const std::function<void(const MultiGraph&, const Rat&)>& visit) {
    MultiGraph current;
    std::function<void(std::size_t, int, Rat)> rec = [&](std::size_t i, int remaining, Rat w) {
        if (remaining == 0) {
            visit(current, w);
            return;
        }
        if (i == support.size()) return;
        // take c copies of support[i]
        Rat wc = w;
        rec(i + 1, remaining, wc);
        for (int c = 1; c <= remaining; ++c) {
            wc *= support[i].second;
            current.multiply(support[i].first, 1);
            rec(i + 1, remaining - c, wc);
        }
        // undo
        MultiGraph reduced;
        for (const auto& [e, m] : current.edges()) {
            long keep = (e == support[i].first) ? 0 : m;
            if (keep > 0) reduced.multiply(e, keep);
        }
        current = std::move(reduced);
    };
    rec(0, k, Rat(1));
}

}  // namespace

SitePolynomial lagrangian_cumulant(const GammaGraphContext& ctx, const QuadraticForm& lagrangian,
                                   int k) {
    require_gamma(ctx);
    if (k < 1 || k > 3) throw std::invalid_argument("lagrangian_cumulant: supported orders are 1..3");

    std::vector<std::pair<GraphEdge, Rat>> support;
    for (const auto& [ij, c] : lagrangian.entries())
        support.emplace_back(GraphEdge(ij.first, ij.second), c);

    std::map<std::string, Rat> memo_chi, memo_cc;
    SitePolynomial out;
    Rat norm = rat_pow(lagrangian.normalization(), k);

    enumerate_edge_multisets(support, k, [&](const MultiGraph& g, const Rat& cprod) {
        if (!is_coarsely_connected(g, ctx.cell_of)) return;
        Rat cc = chi_c_recursive(ctx, g, memo_chi, memo_cc);
        if (cc == 0) return;
        ChiValue shape = chi(ctx, g);
        out += SitePolynomial::monomial(shape.exponents,
                                        Rat(g.ordering_weight()) * cprod * cc * norm);
    });
    return out;
}

SitePolynomial lagrangian_moment(const GammaGraphContext& ctx, const QuadraticForm& lagrangian,
                                 int k) {
    require_gamma(ctx);
    if (k < 0 || k > 4) throw std::invalid_argument("lagrangian_moment: supported orders are 0..4");
    if (k == 0) return SitePolynomial::constant(1);

    std::vector<std::pair<GraphEdge, Rat>> support;
    for (const auto& [ij, c] : lagrangian.entries())
        support.emplace_back(GraphEdge(ij.first, ij.second), c);

    SitePolynomial out;
    Rat norm = rat_pow(lagrangian.normalization(), k);
    enumerate_edge_multisets(support, k, [&](const MultiGraph& g, const Rat& cprod) {
        ChiValue value = chi(ctx, g);
        out += SitePolynomial::monomial(value.exponents,
                                        Rat(g.ordering_weight()) * cprod * value.coeff * norm);
    });
    return out;
}

}  // namespace levylat
