#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "halfline/errors.hpp"

namespace halfline {

/// Uniform space-time lattice on [0, x_max] x [0, T]. Node (i, j) sits at
/// (i*dx, j*dt) with i in [0, n_x) and j in [0, n_t); j = n_t-1 is the
/// terminal row t = T.
struct Mesh {
    double x_max = 1.0;
    int n_x = 3;
    int n_t = 2;
    double horizon = 1.0;

    Mesh() = default;
    Mesh(double xmax, int nx, int nt, double T) : x_max(xmax), n_x(nx), n_t(nt), horizon(T) {
        if (!(x_max > 0.0)) throw PreconditionError("Mesh: x_max must be > 0");
        if (n_x < 3) throw PreconditionError("Mesh: n_x must be >= 3");
        if (n_t < 2) throw PreconditionError("Mesh: n_t must be >= 2");
        if (!(horizon > 0.0)) throw PreconditionError("Mesh: horizon must be > 0");
    }

    double dx() const { return x_max / (n_x - 1); }
    double dt() const { return horizon / (n_t - 1); }
    double x(int i) const { return i == n_x - 1 ? x_max : i * dx(); }
    double t(int j) const { return j == n_t - 1 ? horizon : j * dt(); }

    bool operator==(const Mesh& o) const {
        return x_max == o.x_max && n_x == o.n_x && n_t == o.n_t && horizon == o.horizon;
    }
};

/// Nodal values over a Mesh, stored row-major by time level.
class GridFunction {
  public:
    GridFunction() = default;
    explicit GridFunction(const Mesh& m, double fill = 0.0)
        : mesh_(m),
          values_(static_cast<std::size_t>(m.n_x) * static_cast<std::size_t>(m.n_t), fill) {}

    const Mesh& mesh() const { return mesh_; }
    int n_x() const { return mesh_.n_x; }
    int n_t() const { return mesh_.n_t; }

    double& at(int j, int i) { return values_[idx(j, i)]; }
    double at(int j, int i) const { return values_[idx(j, i)]; }
    double operator()(int j, int i) const { return values_[idx(j, i)]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double sup_norm() const {
        double m = 0.0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    GridFunction& operator-=(const GridFunction& o) {
        require_same_mesh(o);
        for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= o.values_[k];
        return *this;
    }

    friend GridFunction operator-(GridFunction a, const GridFunction& b) {
        a -= b;
        return a;
    }

    void require_same_mesh(const GridFunction& o) const {
        if (!(mesh_ == o.mesh_)) throw ShapeError("grid functions live on different meshes");
    }

  private:
    std::size_t idx(int j, int i) const {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(mesh_.n_x) +
               static_cast<std::size_t>(i);
    }

    Mesh mesh_;
    std::vector<double> values_;
};

}  // namespace halfline
