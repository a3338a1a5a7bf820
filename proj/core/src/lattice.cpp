#include <levylat/lattice.hpp>

#include <stdexcept>

namespace levylat {

SiteIndex::SiteIndex(LatticeConfig cfg, std::vector<int> path) : cfg_(cfg), path_(std::move(path)) {
    for (int c : path_) {
        if (c < 1 || c > cfg_.r()) throw std::invalid_argument("SiteIndex: path entry out of 1..r");
    }
}

SiteIndex SiteIndex::child(int c) const {
    if (c < 1 || c > cfg_.r()) throw std::invalid_argument("SiteIndex::child: index out of 1..r");
    std::vector<int> p = path_;
    p.push_back(c);
    return SiteIndex(cfg_, std::move(p));
}

SiteIndex SiteIndex::parent() const {
    if (path_.empty()) throw std::logic_error("SiteIndex::parent: root has no parent");
    std::vector<int> p(path_.begin(), path_.end() - 1);
    return SiteIndex(cfg_, std::move(p));
}

std::vector<long> SiteIndex::coords() const {
    std::vector<long> c(cfg_.d, 0);
    for (int k = 0; k < level(); ++k) {
        int bits = path_[k] - 1;
        for (int l = 0; l < cfg_.d; ++l) {
            c[l] = (c[l] << 1) | ((bits >> l) & 1);
        }
    }
    return c;
}

SiteIndex SiteIndex::from_coords(LatticeConfig cfg, const std::vector<long>& coords, int level) {
    if (static_cast<int>(coords.size()) != cfg.d)
        throw std::invalid_argument("SiteIndex::from_coords: dimension mismatch");
    std::vector<int> path(level, 1);
    for (int k = 0; k < level; ++k) {
        int bits = 0;
        for (int l = 0; l < cfg.d; ++l) {
            long bit = (coords[l] >> (level - 1 - k)) & 1;
            bits |= static_cast<int>(bit) << l;
        }
        path[k] = bits + 1;
    }
    return SiteIndex(cfg, std::move(path));
}

long SiteIndex::linear_id() const {
    long id = 0;
    for (int c : path_) id = id * cfg_.r() + (c - 1);
    return id;
}

std::vector<SiteIndex> children(const SiteIndex& site) {
    std::vector<SiteIndex> out;
    out.reserve(site.config().r());
    for (int c = 1; c <= site.config().r(); ++c) out.push_back(site.child(c));
    return out;
}

std::vector<SiteIndex> coarse_neighbors(const SiteIndex& site) {
    const LatticeConfig& cfg = site.config();
    const int n = site.level();
    const long side = cfg.side(n);
    std::vector<long> c = site.coords();
    std::vector<SiteIndex> out;
    out.reserve(2 * cfg.d);
    for (int l = 0; l < cfg.d; ++l) {
        for (long step : {-1L, +1L}) {
            std::vector<long> nc = c;
            nc[l] = ((nc[l] + step) % side + side) % side;
            out.push_back(SiteIndex::from_coords(cfg, nc, n));
        }
    }
    return out;
}

FineWindow::FineWindow(int d, int m) : d_(d), m_(m) {
    if (d < 1 || d > 16) throw std::invalid_argument("FineWindow: d out of range");
    if (m < 0 || static_cast<long>(d) * m > 40) throw std::invalid_argument("FineWindow: m out of range");
    side_ = 1L << m;
    npoints_ = 1L << (static_cast<long>(d) * m);
}

void FineWindow::check_point(const Point& p) const {
    if (!contains(p)) throw std::out_of_range("FineWindow: point outside window");
}

bool FineWindow::contains(const Point& p) const {
    if (static_cast<int>(p.size()) != d_) return false;
    for (long x : p)
        if (x < 1 || x > side_) return false;
    return true;
}

long FineWindow::index_of(const Point& p) const {
    check_point(p);
    long idx = 0;
    for (int l = 0; l < d_; ++l) idx = idx * side_ + (p[l] - 1);
    return idx;
}

FineWindow::Point FineWindow::point_at(long index) const {
    if (index < 0 || index >= npoints_) throw std::out_of_range("FineWindow: index out of range");
    Point p(d_, 1);
    for (int l = d_ - 1; l >= 0; --l) {
        p[l] = index % side_ + 1;
        index /= side_;
    }
    return p;
}

std::vector<FineWindow::Point> FineWindow::all_points() const {
    std::vector<Point> out;
    out.reserve(npoints_);
    for (long i = 0; i < npoints_; ++i) out.push_back(point_at(i));
    return out;
}

int FineWindow::stratum_of(const Point& p) const {
    check_point(p);
    int l = 0;
    for (long x : p)
        if (x < side_) ++l;
    return l;
}

std::vector<FineWindow::Point> FineWindow::stratum(int l) const {
    if (l < 0 || l > d_) throw std::out_of_range("FineWindow::stratum: level out of 0..d");
    std::vector<Point> out;
    for (long i = 0; i < npoints_; ++i) {
        Point p = point_at(i);
        if (stratum_of(p) == l) out.push_back(std::move(p));
    }
    return out;
}

Int FineWindow::stratum_size(int l) const {
    if (l < 0 || l > d_) throw std::out_of_range("FineWindow::stratum_size: level out of 0..d");
    return binomial(Int(d_), l) * int_pow(Int(side_ - 1), l);
}

std::optional<FineWindow::Point> FineWindow::shift(int l, const Point& p) const {
    check_point(p);
    if (l < 1 || l > d_) throw std::out_of_range("FineWindow::shift: dimension out of 1..d");
    if (p[l - 1] >= side_) return std::nullopt;
    Point q = p;
    q[l - 1] += 1;
    return q;
}

bool FineWindow::shift_defined(int l, const Point& p) const {
    check_point(p);
    if (l < 1 || l > d_) throw std::out_of_range("FineWindow::shift_defined: dimension out of 1..d");
    return p[l - 1] < side_;
}

std::vector<FineWindow::Point> FineWindow::within_region_neighbors(const Point& p) const {
    check_point(p);
    std::vector<Point> out;
    for (int l = 0; l < d_; ++l) {
        for (long step : {-1L, +1L}) {
            long x = p[l] + step;
            if (x < 1 || x > side_) continue;
            Point q = p;
            q[l] = x;
            out.push_back(std::move(q));
        }
    }
    return out;
}

}  // namespace levylat
