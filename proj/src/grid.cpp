#include "hessfield/grid.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

namespace hessfield {

DomainSpec DomainSpec::rectangle(double x0, double x1, double y0, double y1, double h) {
    DomainSpec d;
    d.kind = DomainKind::Rectangle;
    d.x0 = x0;
    d.x1 = x1;
    d.y0 = y0;
    d.y1 = y1;
    d.h = h;
    d.validate();
    return d;
}

DomainSpec DomainSpec::disc(Vec2 center, double radius, double h) {
    DomainSpec d;
    d.kind = DomainKind::Disc;
    d.center = center;
    d.radius = radius;
    d.h = h;
    d.validate();
    return d;
}

void DomainSpec::validate() const {
    if (!(h > 0.0)) throw Error(ErrorCode::ConfigError, "grid spacing must be positive");
    if (kind == DomainKind::Rectangle) {
        if (!(x1 > x0) || !(y1 > y0)) throw Error(ErrorCode::ConfigError, "degenerate rectangle");
        const double nx = (x1 - x0) / h;
        const double ny = (y1 - y0) / h;
        if (std::abs(nx - std::round(nx)) > 1e-6 || std::abs(ny - std::round(ny)) > 1e-6)
            throw Error(ErrorCode::ConfigError, "h must divide the rectangle sides");
        if (std::round(nx) < 4 || std::round(ny) < 4)
            throw Error(ErrorCode::ConfigError, "rectangle too coarse for interior stencils");
    } else {
        if (!(radius > 0.0)) throw Error(ErrorCode::ConfigError, "degenerate disc");
        if (radius < 8.0 * h) throw Error(ErrorCode::ConfigError, "disc radius must be >= 8h");
    }
}

namespace {

// 3-point first/second derivative weights on offsets (-hl, 0, +hr);
// exact for quadratics
struct AxisWeights {
    double l1, c1, r1;  // first derivative
    double l2, c2, r2;  // second derivative
};

AxisWeights axis_weights(double hl, double hr) {
    AxisWeights w{};
    w.l1 = -hr / (hl * (hl + hr));
    w.c1 = (hr - hl) / (hl * hr);
    w.r1 = hl / (hr * (hl + hr));
    w.l2 = 2.0 / (hl * (hl + hr));
    w.c2 = -2.0 / (hl * hr);
    w.r2 = 2.0 / (hr * (hl + hr));
    return w;
}

}  // namespace

Grid::Grid(const DomainSpec& spec) : spec_(spec) {
    spec_.validate();
    if (spec_.kind == DomainKind::Rectangle)
        build_rectangle();
    else
        build_disc();
    build_axis_rows();
    build_mixed_rows();
    build_boundary_cycle();
}

long Grid::lattice_slot(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
    return lattice_[static_cast<size_t>(j) * static_cast<size_t>(nx_) + static_cast<size_t>(i)];
}

Vec2 Grid::position(long slot) const {
    if (is_trace(slot)) return trace(slot).pos;
    return interior_pos_[static_cast<size_t>(slot)];
}

bool Grid::boundary_adjacent(long slot) const {
    if (!is_interior(slot)) return false;
    for (int ax = 0; ax < 2; ++ax) {
        const auto& nb = axis_[static_cast<size_t>(slot)][static_cast<size_t>(ax)];
        if (is_trace(nb.left) || is_trace(nb.right)) return true;
    }
    return false;
}

Vec2 Grid::gamma_ext(long slot) const {
    const Vec2 p = position(slot);
    if (spec_.kind == DomainKind::Disc) {
        const Vec2 d = p - spec_.center;
        const double n = d.norm();
        if (n < 1e-14) return {1.0, 0.0};
        return d * (1.0 / n);
    }
    // gradient of the signed distance to the rectangle: outward normal of the
    // nearest edge, fixed priority on ties
    const double dl = p.x - spec_.x0, dr = spec_.x1 - p.x;
    const double db = p.y - spec_.y0, dt = spec_.y1 - p.y;
    const double m = std::min(std::min(dl, dr), std::min(db, dt));
    if (m == dl) return {-1.0, 0.0};
    if (m == dr) return {1.0, 0.0};
    if (m == db) return {0.0, -1.0};
    return {0.0, 1.0};
}

void Grid::build_rectangle() {
    const double h = spec_.h;
    nx_ = static_cast<int>(std::round((spec_.x1 - spec_.x0) / h)) + 1;
    ny_ = static_cast<int>(std::round((spec_.y1 - spec_.y0) / h)) + 1;
    origin_ = {spec_.x0, spec_.y0};
    lattice_.assign(static_cast<size_t>(nx_) * static_cast<size_t>(ny_), -1);

    long slot = 0;
    for (int j = 1; j < ny_ - 1; ++j)
        for (int i = 1; i < nx_ - 1; ++i) {
            lattice_[static_cast<size_t>(j) * static_cast<size_t>(nx_) + static_cast<size_t>(i)] =
                slot++;
            interior_pos_.push_back({origin_.x + i * h, origin_.y + j * h});
        }
    interior_count_ = slot;

    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            const bool edge = (i == 0 || j == 0 || i == nx_ - 1 || j == ny_ - 1);
            if (!edge) continue;
            TraceNode t;
            t.pos = {origin_.x + i * h, origin_.y + j * h};
            const bool cx = (i == 0 || i == nx_ - 1);
            const bool cy = (j == 0 || j == ny_ - 1);
            t.corner = cx && cy;
            if (!t.corner) {
                if (i == 0)
                    t.normal = {-1.0, 0.0};
                else if (i == nx_ - 1)
                    t.normal = {1.0, 0.0};
                else if (j == 0)
                    t.normal = {0.0, -1.0};
                else
                    t.normal = {0.0, 1.0};
            }
            t.curvature = 0.0;
            t.theta = 1.0;
            lattice_[static_cast<size_t>(j) * static_cast<size_t>(nx_) + static_cast<size_t>(i)] =
                interior_count_ + static_cast<long>(trace_.size());
            trace_.push_back(t);
        }
    // owners for edge trace nodes: the adjacent interior node
    for (size_t k = 0; k < trace_.size(); ++k) {
        TraceNode& t = trace_[k];
        if (t.corner) continue;
        const Vec2 inward = t.pos - t.normal * spec_.h;
        const int i = static_cast<int>(std::round((inward.x - origin_.x) / spec_.h));
        const int j = static_cast<int>(std::round((inward.y - origin_.y) / spec_.h));
        t.owner = lattice_slot(i, j);
    }
}

void Grid::build_disc() {
    const double h = spec_.h;
    const double r = spec_.radius;
    const int N = static_cast<int>(std::ceil(r / h)) + 2;
    nx_ = ny_ = 2 * N + 1;
    origin_ = {spec_.center.x - N * h, spec_.center.y - N * h};
    lattice_.assign(static_cast<size_t>(nx_) * static_cast<size_t>(ny_), -1);

    const double r2tol = r * r * (1.0 - 1e-12);
    long slot = 0;
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            const Vec2 p{origin_.x + i * h, origin_.y + j * h};
            const Vec2 d = p - spec_.center;
            if (d.dot(d) < r2tol) {
                lattice_[static_cast<size_t>(j) * static_cast<size_t>(nx_) + static_cast<size_t>(i)] =
                    slot++;
                interior_pos_.push_back(p);
            }
        }
    interior_count_ = slot;

    // Shortley-Weller trace points where axis segments leave the disc
    const int di[4] = {1, -1, 0, 0};
    const int dj[4] = {0, 0, 1, -1};
    for (int j = 0; j < ny_; ++j)
        for (int i = 0; i < nx_; ++i) {
            const long s = lattice_slot(i, j);
            if (s < 0 || s >= interior_count_) continue;
            const Vec2 p = interior_pos_[static_cast<size_t>(s)];
            for (int d4 = 0; d4 < 4; ++d4) {
                const long nb = lattice_slot(i + di[d4], j + dj[d4]);
                if (nb >= 0) continue;
                const Vec2 dir{static_cast<double>(di[d4]), static_cast<double>(dj[d4])};
                const double m = dir.dot(p - spec_.center);
                const double q = r * r - (p - spec_.center).dot(p - spec_.center);
                double theta = (-m + std::sqrt(m * m + q)) / h;
                theta = std::clamp(theta, 1e-10, 1.0);
                TraceNode t;
                t.pos = p + dir * (theta * h);
                const Vec2 nrm = t.pos - spec_.center;
                t.normal = nrm * (1.0 / nrm.norm());
                t.curvature = 1.0 / r;
                t.owner = s;
                t.theta = theta;
                trace_.push_back(t);
            }
        }
}

void Grid::build_axis_rows() {
    axis_.assign(static_cast<size_t>(interior_count_), {});
    stencil_.assign(static_cast<size_t>(interior_count_), {});

    // trace lookup by (owner, axis, sign) for the disc
    std::map<std::tuple<long, int, int>, long> trace_by_dir;
    for (size_t k = 0; k < trace_.size(); ++k) {
        const TraceNode& t = trace_[k];
        if (t.owner < 0 || spec_.kind == DomainKind::Rectangle) continue;
        const Vec2 d = t.pos - interior_pos_[static_cast<size_t>(t.owner)];
        const int ax = std::abs(d.x) > std::abs(d.y) ? 0 : 1;
        const int sign = (ax == 0 ? d.x : d.y) > 0 ? 1 : -1;
        trace_by_dir[{t.owner, ax, sign}] = interior_count_ + static_cast<long>(k);
    }

    const double h = spec_.h;
    for (long s = 0; s < interior_count_; ++s) {
        const Vec2 p = interior_pos_[static_cast<size_t>(s)];
        const int i = static_cast<int>(std::round((p.x - origin_.x) / h));
        const int j = static_cast<int>(std::round((p.y - origin_.y) / h));
        for (int ax = 0; ax < 2; ++ax) {
            AxisNbr nb;
            for (int sign : {-1, 1}) {
                const long lat = ax == 0 ? lattice_slot(i + sign, j) : lattice_slot(i, j + sign);
                long slot = -1;
                double spacing = h;
                if (lat >= 0) {
                    slot = lat;  // interior or rectangle edge node at distance h
                } else {
                    const auto it = trace_by_dir.find({s, ax, sign});
                    if (it == trace_by_dir.end())
                        throw Error(ErrorCode::DiscretizationError, "missing axis neighbor");
                    slot = it->second;
                    spacing = trace(slot).theta * h;
                }
                if (sign < 0) {
                    nb.left = slot;
                    nb.hl = spacing;
                } else {
                    nb.right = slot;
                    nb.hr = spacing;
                }
            }
            axis_[static_cast<size_t>(s)][static_cast<size_t>(ax)] = nb;

            const AxisWeights w = axis_weights(nb.hl, nb.hr);
            StencilRow d1{{nb.left, w.l1}, {s, w.c1}, {nb.right, w.r1}};
            StencilRow d2{{nb.left, w.l2}, {s, w.c2}, {nb.right, w.r2}};
            if (ax == 0) {
                stencil_[static_cast<size_t>(s)].dx = std::move(d1);
                stencil_[static_cast<size_t>(s)].dxx = std::move(d2);
            } else {
                stencil_[static_cast<size_t>(s)].dy = std::move(d1);
                stencil_[static_cast<size_t>(s)].dyy = std::move(d2);
            }
        }
    }
}

void Grid::build_mixed_rows() {
    const double h = spec_.h;
    for (long s = 0; s < interior_count_; ++s) {
        const Vec2 p = interior_pos_[static_cast<size_t>(s)];
        const int i = static_cast<int>(std::round((p.x - origin_.x) / h));
        const int j = static_cast<int>(std::round((p.y - origin_.y) / h));

        // centered 4-point cross
        const long pp = lattice_slot(i + 1, j + 1);
        const long mm = lattice_slot(i - 1, j - 1);
        const long pm = lattice_slot(i + 1, j - 1);
        const long mp = lattice_slot(i - 1, j + 1);
        if (pp >= 0 && mm >= 0 && pm >= 0 && mp >= 0) {
            const double w = 1.0 / (4.0 * h * h);
            stencil_[static_cast<size_t>(s)].dxy = {{pp, w}, {mm, w}, {pm, -w}, {mp, -w}};
            continue;
        }

        // one-sided cross pointing into the domain
        bool done = false;
        for (const auto& [sx, sy] :
             {std::pair<int, int>{1, 1}, {1, -1}, {-1, 1}, {-1, -1}}) {
            const long ex = lattice_slot(i + sx, j);
            const long ey = lattice_slot(i, j + sy);
            const long ed = lattice_slot(i + sx, j + sy);
            if (ex < 0 || ey < 0 || ed < 0) continue;
            const double w = 1.0 / (sx * sy * h * h);
            stencil_[static_cast<size_t>(s)].dxy = {{s, w}, {ed, w}, {ex, -w}, {ey, -w}};
            done = true;
            break;
        }
        if (done) continue;

        // quadratic least-squares fit over the neighborhood, trace points
        // included; exact for quadratics when the fit interpolates
        std::vector<long> pts;
        for (int djj = -2; djj <= 2; ++djj)
            for (int dii = -2; dii <= 2; ++dii) {
                const long q = lattice_slot(i + dii, j + djj);
                if (q >= 0) pts.push_back(q);
            }
        for (long t = interior_count_; t < slot_count(); ++t) {
            const Vec2 d = trace(t).pos - p;
            if (std::abs(d.x) <= 2.0 * h && std::abs(d.y) <= 2.0 * h) pts.push_back(t);
        }
        if (pts.size() < 6) throw Error(ErrorCode::DiscretizationError, "starved mixed stencil");

        Eigen::MatrixXd Z(static_cast<long>(pts.size()), 6);
        for (size_t kq = 0; kq < pts.size(); ++kq) {
            const Vec2 d = position(pts[kq]) - p;
            const double X = d.x / h, Y = d.y / h;
            Z(static_cast<long>(kq), 0) = 1.0;
            Z(static_cast<long>(kq), 1) = X;
            Z(static_cast<long>(kq), 2) = Y;
            Z(static_cast<long>(kq), 3) = X * X;
            Z(static_cast<long>(kq), 4) = X * Y;
            Z(static_cast<long>(kq), 5) = Y * Y;
        }
        const Eigen::MatrixXd G = Z.transpose() * Z;
        Eigen::VectorXd e = Eigen::VectorXd::Zero(6);
        e(4) = 1.0;
        Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
        if (!lu.isInvertible())
            throw Error(ErrorCode::DiscretizationError, "singular mixed stencil fit");
        const Eigen::VectorXd v = lu.solve(e);
        const Eigen::VectorXd w = Z * v;
        StencilRow row;
        for (size_t kq = 0; kq < pts.size(); ++kq)
            row.emplace_back(pts[kq], w(static_cast<long>(kq)) / (h * h));
        stencil_[static_cast<size_t>(s)].dxy = std::move(row);
    }
}

void Grid::build_boundary_cycle() {
    boundary_cycle_.clear();
    for (long t = interior_count_; t < slot_count(); ++t) boundary_cycle_.push_back(t);
    if (spec_.kind == DomainKind::Disc) {
        std::sort(boundary_cycle_.begin(), boundary_cycle_.end(), [&](long a, long b) {
            const Vec2 da = trace(a).pos - spec_.center;
            const Vec2 db = trace(b).pos - spec_.center;
            const double ta = std::atan2(da.y, da.x);
            const double tb = std::atan2(db.y, db.x);
            if (ta != tb) return ta < tb;
            return a < b;
        });
        return;
    }
    // perimeter arc-length parameter, counterclockwise from (x0, y0)
    const auto param = [&](const Vec2& p) {
        const double w = spec_.x1 - spec_.x0, hgt = spec_.y1 - spec_.y0;
        const double eps = 1e-12;
        if (std::abs(p.y - spec_.y0) < eps) return p.x - spec_.x0;
        if (std::abs(p.x - spec_.x1) < eps) return w + (p.y - spec_.y0);
        if (std::abs(p.y - spec_.y1) < eps) return w + hgt + (spec_.x1 - p.x);
        return 2.0 * w + hgt + (spec_.y1 - p.y);
    };
    std::sort(boundary_cycle_.begin(), boundary_cycle_.end(),
              [&](long a, long b) { return param(trace(a).pos) < param(trace(b).pos); });
}

GridFunction GridFunction::sample(std::shared_ptr<const Grid> g,
                                  const std::function<double(Vec2)>& f) {
    GridFunction out(std::move(g));
    for (long s = 0; s < out.grid->slot_count(); ++s) out[s] = f(out.grid->position(s));
    return out;
}

double GridFunction::apply_row(const StencilRow& row) const {
    double acc = 0.0;
    for (const auto& [slot, w] : row) acc += w * values[static_cast<size_t>(slot)];
    return acc;
}

Vec2 fd_gradient(const GridFunction& f, long slot) {
    if (!f.grid->is_interior(slot))
        throw Error(ErrorCode::DiscretizationError, "gradient stencil needs an interior node");
    return {f.apply_row(f.grid->dx_row(slot)), f.apply_row(f.grid->dy_row(slot))};
}

SymMat fd_hessian(const GridFunction& f, long slot) {
    if (!f.grid->is_interior(slot))
        throw Error(ErrorCode::DiscretizationError, "hessian stencil needs an interior node");
    SymMat h(2);
    h.at(0, 0) = f.apply_row(f.grid->dxx_row(slot));
    h.at(1, 1) = f.apply_row(f.grid->dyy_row(slot));
    h.at(0, 1) = f.apply_row(f.grid->dxy_row(slot));
    return h;
}

Vec2 trace_gradient(const GridFunction& f, long trace_slot) {
    if (!f.grid->is_trace(trace_slot))
        throw Error(ErrorCode::DiscretizationError, "trace gradient needs a trace node");
    const TraceNode& t = f.grid->trace(trace_slot);
    if (t.owner < 0) throw Error(ErrorCode::DiscretizationError, "trace node has no interior support");
    const Vec2 g = fd_gradient(f, t.owner);
    const SymMat H = fd_hessian(f, t.owner);
    const Vec2 d = t.pos - f.grid->position(t.owner);
    return {g.x + H(0, 0) * d.x + H(0, 1) * d.y, g.y + H(0, 1) * d.x + H(1, 1) * d.y};
}

double boundary_normal_derivative(const GridFunction& f, long trace_slot) {
    const TraceNode& t = f.grid->trace(trace_slot);
    if (t.corner) throw Error(ErrorCode::DiscretizationError, "normal undefined at a corner");
    const Vec2 g = trace_gradient(f, trace_slot);
    return t.normal.dot(g);
}

Vec2 tangential_gradient(const GridFunction& f, long slot) {
    Vec2 g, n;
    if (f.grid->is_interior(slot)) {
        g = fd_gradient(f, slot);
        n = f.grid->gamma_ext(slot);
    } else {
        const TraceNode& t = f.grid->trace(slot);
        if (t.corner) throw Error(ErrorCode::DiscretizationError, "tangent undefined at a corner");
        g = trace_gradient(f, slot);
        n = t.normal;
    }
    const double gn = g.dot(n);
    return {g.x - gn * n.x, g.y - gn * n.y};
}

void dump_csv(const GridFunction& f, const std::string& path,
              const std::vector<std::pair<std::string, std::vector<double>>>& extra) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw Error(ErrorCode::ConfigError, "cannot open " + path);
    std::fprintf(fp, "x,y,class,value");
    for (const auto& [name, col] : extra) {
        (void)col;
        std::fprintf(fp, ",%s", name.c_str());
    }
    std::fprintf(fp, "\n");
    const Grid& g = *f.grid;
    for (long s = 0; s < g.slot_count(); ++s) {
        const Vec2 p = g.position(s);
        const char* cls = g.is_interior(s)
                              ? (g.boundary_adjacent(s) ? "boundary_adjacent" : "interior")
                              : (g.trace(s).corner ? "corner" : "trace");
        std::fprintf(fp, "%.17g,%.17g,%s,%.17g", p.x, p.y, cls, f[s]);
        for (const auto& [name, col] : extra) {
            (void)name;
            std::fprintf(fp, ",%.17g", col[static_cast<size_t>(s)]);
        }
        std::fprintf(fp, "\n");
    }
    std::fclose(fp);
}

}  // namespace hessfield
