#pragma once

#include <levylat/rational.hpp>

#include <optional>
#include <vector>

namespace levylat {

/// Geometry of the refining hypercube lattice on the unit torus.
///
/// Each refinement step halves every side, so a cell splits into r = 2^d
/// children and the sidelength at level n is 2^-n.
struct LatticeConfig {
    int d = 1;

    explicit LatticeConfig(int dim) : d(dim) {
        if (d < 1 || d > 16) throw std::invalid_argument("LatticeConfig: d out of range");
    }

    long r() const { return 1L << d; }
    long side(int n) const { return 1L << n; }          // cells per side at level n
    long cells(int n) const { return 1L << (d * n); }   // r^n
    Rat sidelength(int n) const { return rat_pow(Rat(1, 2), n); }
    Rat cell_volume(int n) const { return Rat(1, int_pow(Int(r()), n)); }
};

/// Multi-index address of a cell: path (i_1, ..., i_n), each entry in 1..r.
/// Bit l of (i_k - 1) selects the upper half along dimension l at step k,
/// so coordinates come out lexicographic and reproducible.
class SiteIndex {
  public:
    SiteIndex() = default;
    SiteIndex(LatticeConfig cfg, std::vector<int> path);

    static SiteIndex root(LatticeConfig cfg) { return SiteIndex(cfg, {}); }
    static SiteIndex from_coords(LatticeConfig cfg, const std::vector<long>& coords, int level);

    int level() const { return static_cast<int>(path_.size()); }
    const std::vector<int>& path() const { return path_; }
    const LatticeConfig& config() const { return cfg_; }

    SiteIndex child(int c) const;  // c in 1..r
    SiteIndex parent() const;

    /// Per-dimension coordinates in {0, ..., 2^level - 1}.
    std::vector<long> coords() const;

    /// Linear id: mixed-radix over the path entries (lexicographic order).
    long linear_id() const;

    bool operator==(const SiteIndex& o) const { return path_ == o.path_; }
    bool operator<(const SiteIndex& o) const { return path_ < o.path_; }

  private:
    LatticeConfig cfg_{1};
    std::vector<int> path_;
};

std::vector<SiteIndex> children(const SiteIndex& site);

/// The 2d nearest neighbours on the level-n torus, counted with multiplicity
/// (a two-cell ring sees the other cell from both directions).
std::vector<SiteIndex> coarse_neighbors(const SiteIndex& site);

/// One coarse cell refined m times, identified with {1,...,2^m}^d.
/// Adjacency inside the window never wraps; wrapping is a property of the
/// coarse torus, not of the window.
class FineWindow {
  public:
    FineWindow(int d, int m);

    int d() const { return d_; }
    int m() const { return m_; }
    long side() const { return side_; }          // 2^m points per side
    long size() const { return npoints_; }       // r^m points

    using Point = std::vector<long>;             // entries in 1..side

    bool contains(const Point& p) const;
    long index_of(const Point& p) const;         // 0-based lexicographic
    Point point_at(long index) const;
    std::vector<Point> all_points() const;

    /// Number of coordinates strictly below the far face.
    int stratum_of(const Point& p) const;
    /// All points of stratum l (0 <= l <= d); |stratum l| = C(d,l)(side-1)^l.
    std::vector<Point> stratum(int l) const;
    Int stratum_size(int l) const;

    /// Shift along dimension l (1-based); defined iff p_l < side.
    std::optional<Point> shift(int l, const Point& p) const;
    bool shift_defined(int l, const Point& p) const;

    /// Hard-wall nearest neighbours of p inside the window.
    std::vector<Point> within_region_neighbors(const Point& p) const;

  private:
    void check_point(const Point& p) const;
    int d_;
    int m_;
    long side_;
    long npoints_;
};

}  // namespace levylat
