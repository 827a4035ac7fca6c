// Discrete function spaces on a uniform cell-centered grid: ghost-cell
// boundary handling, centered difference operators, and weighted inner
// products. All fields are m x n arrays of cell-center samples; ghost
// values are derived on demand from the boundary regime, never stored.
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hf {

enum class BoundaryType { Periodic, NeumannNoFlux, Channel };

// Channel: periodic in x, solid walls below row 0 and above row n-1.
// Wall speeds are the tangential (x) velocities of the two walls.
struct BoundarySpec {
    BoundaryType type = BoundaryType::Periodic;
    double u_wall_bottom = 0.0;
    double u_wall_top = 0.0;

    bool operator==(const BoundarySpec&) const = default;
};

struct GridSpec {
    int m = 0;              // cells in x
    int n = 0;              // cells in y
    double h = 0.0;         // uniform spacing, Lx = m*h, Ly = n*h
    BoundarySpec boundary;

    double lx() const { return m * h; }
    double ly() const { return n * h; }
    // cell centers x_i = (i+1)*h, y_j = (j+1)*h for 0-based (i,j)
    double x(int i) const { return (i + 1) * h; }
    double y(int j) const { return (j + 1) * h; }
    std::size_t cells() const { return std::size_t(m) * std::size_t(n); }

    bool same_mesh(const GridSpec& o) const {
        return m == o.m && n == o.n && h == o.h && boundary == o.boundary;
    }
};

GridSpec make_grid(int m, int n, double h, BoundarySpec boundary = {});

// How a field reflects at solid walls. Scalars copy (no-flux), the
// tangential velocity reflects about the wall speed, the normal velocity
// reflects with a sign flip so the wall face value is zero.
enum class GhostKind { Scalar, VelocityX, VelocityY };

class CellField {
public:
    CellField() = default;
    explicit CellField(const GridSpec& g, double fill = 0.0)
        : grid_(g), v_(g.cells(), fill) {}

    const GridSpec& grid() const { return grid_; }
    int m() const { return grid_.m; }
    int n() const { return grid_.n; }

    double& operator()(int i, int j) { return v_[std::size_t(j) * grid_.m + i]; }
    double operator()(int i, int j) const { return v_[std::size_t(j) * grid_.m + i]; }

    double* data() { return v_.data(); }
    const double* data() const { return v_.data(); }
    std::size_t size() const { return v_.size(); }

    void fill(double c) { v_.assign(v_.size(), c); }

private:
    GridSpec grid_;
    std::vector<double> v_;
};

struct VelocityField {
    CellField u;  // x component
    CellField v;  // y component

    VelocityField() = default;
    explicit VelocityField(const GridSpec& g) : u(g), v(g) {}
    const GridSpec& grid() const { return u.grid(); }
};

// Read access to a field extended by one ghost layer, indices in
// [-1, m] x [-1, n]. Ghost values are computed on the fly from the
// boundary regime and the field kind.
class GhostView {
public:
    GhostView(const CellField& f, GhostKind kind)
        : f_(&f), kind_(kind), m_(f.m()), n_(f.n()),
          btype_(f.grid().boundary.type),
          uwb_(f.grid().boundary.u_wall_bottom),
          uwt_(f.grid().boundary.u_wall_top) {}

    double operator()(int i, int j) const {
        // x direction: periodic unless the whole domain is Neumann
        if (i < 0) i = (btype_ == BoundaryType::NeumannNoFlux) ? 0 : m_ - 1;
        else if (i >= m_) i = (btype_ == BoundaryType::NeumannNoFlux) ? m_ - 1 : 0;

        if (j >= 0 && j < n_) return (*f_)(i, j);

        switch (btype_) {
            case BoundaryType::Periodic:
                return (*f_)(i, j < 0 ? n_ - 1 : 0);
            case BoundaryType::NeumannNoFlux:
                return (*f_)(i, j < 0 ? 0 : n_ - 1);
            case BoundaryType::Channel: {
                const int jin = (j < 0) ? 0 : n_ - 1;
                const double in = (*f_)(i, jin);
                switch (kind_) {
                    case GhostKind::Scalar:    return in;
                    case GhostKind::VelocityX: return 2.0 * (j < 0 ? uwb_ : uwt_) - in;
                    case GhostKind::VelocityY: return -in;
                }
            }
        }
        return 0.0;  // unreachable
    }

private:
    const CellField* f_;
    GhostKind kind_;
    int m_, n_;
    BoundaryType btype_;
    double uwb_, uwt_;
};

inline GhostView ghost_fill(const CellField& f, GhostKind kind) { return GhostView(f, kind); }

// Centered first differences, (f_{i+1} - f_{i-1}) / 2h in each direction.
std::pair<CellField, CellField> grad_h(const CellField& phi, GhostKind kind = GhostKind::Scalar);

// (du/dx + dv/dy) with centered differences.
CellField div_h(const VelocityField& w);

// Standard 5-point Laplacian.
CellField laplacian_h(const CellField& phi, GhostKind kind = GhostKind::Scalar);

// omega = (v_{i+1,j} - v_{i-1,j} - u_{i,j+1} + u_{i,j-1}) / 2h
CellField vorticity(const VelocityField& w);

// Weighted inner product (phi || psi) = h^2 sum phi_ij psi_ij.
double inner(const CellField& phi, const CellField& psi);
// sqrt((phi || phi))
double norm2(const CellField& phi);
// Un-rooted fourth-power sum (phi^4 || 1); the discrete energies use this
// form directly.
double norm4_pow(const CellField& phi);
// (phi || 1)
double field_mass(const CellField& phi);

double max_abs(const CellField& phi);
double min_value(const CellField& phi);
double max_value(const CellField& phi);

void require_same_mesh(const GridSpec& a, const GridSpec& b, const char* where);

}  // namespace hf
