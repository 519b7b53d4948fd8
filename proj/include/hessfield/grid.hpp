// 2-D masked Cartesian grids on rectangles and discs: node classification,
// Shortley-Weller boundary-trace points, finite-difference stencil rows for
// gradients and Hessians, boundary geometry (outward normal, curvature) and
// the interior extension of the normal field.
#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hessfield/errors.hpp"
#include "hessfield/symmat.hpp"

namespace hessfield {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    Vec2 rot90() const { return {-y, x}; }
};

enum class DomainKind { Rectangle, Disc };

struct DomainSpec {
    DomainKind kind = DomainKind::Rectangle;
    double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;  // rectangle
    Vec2 center{0.0, 0.0};
    double radius = 1.0;  // disc
    double h = 1.0 / 32.0;

    static DomainSpec rectangle(double x0, double x1, double y0, double y1, double h);
    static DomainSpec disc(Vec2 center, double radius, double h);
    void validate() const;
};

// weighted row over slots: sum_i w_i u[slot_i]
using StencilRow = std::vector<std::pair<long, double>>;

struct TraceNode {
    Vec2 pos;
    Vec2 normal;   // outward unit normal; zero at rectangle corners
    double curvature = 0.0;
    bool corner = false;
    long owner = -1;     // interior slot the trace point was generated from
    double theta = 1.0;  // fractional distance owner -> trace along the axis
};

// Slot layout: [0, interior_count) interior lattice nodes, then trace nodes.
class Grid {
  public:
    explicit Grid(const DomainSpec& spec);

    const DomainSpec& domain() const { return spec_; }
    double h() const { return spec_.h; }
    long interior_count() const { return interior_count_; }
    long trace_count() const { return static_cast<long>(trace_.size()); }
    long slot_count() const { return interior_count_ + trace_count(); }

    bool is_interior(long slot) const { return slot < interior_count_; }
    bool is_trace(long slot) const { return slot >= interior_count_; }
    const TraceNode& trace(long slot) const { return trace_[static_cast<size_t>(slot - interior_count_)]; }
    Vec2 position(long slot) const;

    // interior node with a trace neighbor on some axis
    bool boundary_adjacent(long slot) const;

    // extended unit outward-normal field (gradient of the signed distance)
    Vec2 gamma_ext(long interior_slot) const;

    // stencil rows at an interior slot
    const StencilRow& dx_row(long slot) const { return stencil_[static_cast<size_t>(slot)].dx; }
    const StencilRow& dy_row(long slot) const { return stencil_[static_cast<size_t>(slot)].dy; }
    const StencilRow& dxx_row(long slot) const { return stencil_[static_cast<size_t>(slot)].dxx; }
    const StencilRow& dyy_row(long slot) const { return stencil_[static_cast<size_t>(slot)].dyy; }
    const StencilRow& dxy_row(long slot) const { return stencil_[static_cast<size_t>(slot)].dxy; }

    // trace slots ordered along the boundary (by angle on a disc, by perimeter
    // arc on a rectangle); rectangle corners are included
    const std::vector<long>& boundary_cycle() const { return boundary_cycle_; }

  private:
    struct Stencils {
        StencilRow dx, dy, dxx, dyy, dxy;
    };

    void build_rectangle();
    void build_disc();
    void build_axis_rows();
    void build_mixed_rows();
    void build_boundary_cycle();

    long lattice_slot(int i, int j) const;  // -1 when not a value-carrying node

    DomainSpec spec_;
    int nx_ = 0, ny_ = 0;  // lattice node counts per axis
    Vec2 origin_;
    std::vector<long> lattice_;  // (nx*ny) -> slot or -1
    std::vector<Vec2> interior_pos_;
    std::vector<TraceNode> trace_;
    // per interior node, per axis (0=x,1=y): neighbor slots and spacings
    struct AxisNbr {
        long left = -1, right = -1;
        double hl = 0.0, hr = 0.0;
    };
    std::vector<std::array<AxisNbr, 2>> axis_;
    std::vector<Stencils> stencil_;
    std::vector<long> boundary_cycle_;
    long interior_count_ = 0;
};

struct GridFunction {
    std::shared_ptr<const Grid> grid;
    std::vector<double> values;

    GridFunction() = default;
    explicit GridFunction(std::shared_ptr<const Grid> g)
        : grid(std::move(g)), values(static_cast<size_t>(grid->slot_count()), 0.0) {}

    static GridFunction sample(std::shared_ptr<const Grid> g, const std::function<double(Vec2)>& f);

    double operator[](long slot) const { return values[static_cast<size_t>(slot)]; }
    double& operator[](long slot) { return values[static_cast<size_t>(slot)]; }

    double apply_row(const StencilRow& row) const;
};

Vec2 fd_gradient(const GridFunction& f, long interior_slot);
SymMat fd_hessian(const GridFunction& f, long interior_slot);

// gradient at a trace node: owner gradient Taylor-corrected by the owner
// Hessian (a second-order one-sided evaluation)
Vec2 trace_gradient(const GridFunction& f, long trace_slot);

// D_gamma f at a boundary-trace node (outward normal derivative)
double boundary_normal_derivative(const GridFunction& f, long trace_slot);

// delta f = Df - (gamma . Df) gamma using the extended normal field
Vec2 tangential_gradient(const GridFunction& f, long slot);

// CSV dump, header "x,y,class,value[,extra...]"
void dump_csv(const GridFunction& f, const std::string& path,
              const std::vector<std::pair<std::string, std::vector<double>>>& extra = {});

}  // namespace hessfield
