#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nheat/errors.hpp"

namespace nheat {

/// Neumaier-compensated running sum. Deterministic left-to-right order.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Uniform node layout x_j = j*dx on [0, L], j = 0..J-1.
class Grid1D {
public:
    Grid1D(long J, double L) : J_(J), L_(L) {
        require(J >= 2, "Grid1D: J must be >= 2, got " + std::to_string(J));
        require(std::isfinite(L) && L > 0.0, "Grid1D: L must be positive");
        dx_ = L / static_cast<double>(J - 1);
    }

    [[nodiscard]] long J() const noexcept { return J_; }
    [[nodiscard]] double L() const noexcept { return L_; }
    [[nodiscard]] double dx() const noexcept { return dx_; }

    /// Last node is pinned to L so that node(J-1) == L exactly.
    [[nodiscard]] double node(long j) const {
        require(j >= 0 && j < J_, "Grid1D::node: index out of range");
        return j == J_ - 1 ? L_ : static_cast<double>(j) * dx_;
    }

    friend bool operator==(const Grid1D& a, const Grid1D& b) noexcept {
        return a.J_ == b.J_ && a.L_ == b.L_;
    }

private:
    long J_;
    double L_;
    double dx_;
};

/// Nodal values on a Grid1D.
class Field1D {
public:
    explicit Field1D(const Grid1D& g, double fill = 0.0)
        : grid_(g), v_(static_cast<std::size_t>(g.J()), fill) {}

    Field1D(const Grid1D& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
        require(v_.size() == static_cast<std::size_t>(g.J()), "Field1D: length does not match grid");
        for (double x : v_) require(std::isfinite(x), "Field1D: non-finite entry");
    }

    static Field1D ones(const Grid1D& g) { return Field1D(g, 1.0); }

    /// Canonical basis vector e_k.
    static Field1D unit(const Grid1D& g, long k) {
        require(k >= 0 && k < g.J(), "Field1D::unit: index out of range");
        Field1D f(g);
        f.v_[static_cast<std::size_t>(k)] = 1.0;
        return f;
    }

    [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
    [[nodiscard]] double& operator[](std::size_t j) noexcept { return v_[j]; }
    [[nodiscard]] double operator[](std::size_t j) const noexcept { return v_[j]; }
    [[nodiscard]] std::span<double> values() & noexcept { return v_; }
    [[nodiscard]] std::span<const double> values() const& noexcept { return v_; }
    // A temporary hands over its storage so range-for over it stays valid.
    [[nodiscard]] std::vector<double> values() && noexcept { return std::move(v_); }
    [[nodiscard]] const std::vector<double>& vector() const noexcept { return v_; }

    void add_constant(double c) noexcept {
        for (double& x : v_) x += c;
    }

    Field1D& operator+=(const Field1D& o) {
        require(grid_ == o.grid_, "Field1D: grid mismatch");
        for (std::size_t j = 0; j < v_.size(); ++j) v_[j] += o.v_[j];
        return *this;
    }
    Field1D& operator-=(const Field1D& o) {
        require(grid_ == o.grid_, "Field1D: grid mismatch");
        for (std::size_t j = 0; j < v_.size(); ++j) v_[j] -= o.v_[j];
        return *this;
    }
    Field1D& operator*=(double a) noexcept {
        for (double& x : v_) x *= a;
        return *this;
    }

private:
    Grid1D grid_;
    std::vector<double> v_;
};

inline Field1D operator+(Field1D a, const Field1D& b) { return a += b; }
inline Field1D operator-(Field1D a, const Field1D& b) { return a -= b; }
inline Field1D operator*(double s, Field1D a) { return a *= s; }

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    CompensatedSum s;
    for (std::size_t j = 0; j < a.size(); ++j) s.add(a[j] * b[j]);
    return s.value();
}

inline double sum(std::span<const double> a) {
    CompensatedSum s;
    for (double x : a) s.add(x);
    return s.value();
}

}  // namespace detail

/// <v,w> = (1/J) sum_j v_j w_j
inline double inner(const Field1D& v, const Field1D& w) {
    require(v.grid() == w.grid(), "inner: grid mismatch");
    return detail::dot(v.values(), w.values()) / static_cast<double>(v.grid().J());
}

/// Same accumulation order as inner(v, ones): v_j * 1.0 == v_j exactly.
inline double mean(const Field1D& v) {
    return detail::sum(v.values()) / static_cast<double>(v.grid().J());
}

inline double norm_l2(const Field1D& v) { return std::sqrt(inner(v, v)); }

/// (Pi w)_j = w(x_j)
template <class F>
Field1D project(const Grid1D& g, F&& w) {
    std::vector<double> out(static_cast<std::size_t>(g.J()));
    for (long j = 0; j < g.J(); ++j) out[static_cast<std::size_t>(j)] = w(g.node(j));
    return Field1D(g, std::move(out));
}

/// Tensor lattice (i*dx, j*dy) on [0,Lx]x[0,Ly].
class Grid2D {
public:
    Grid2D(long Jx, long Jy, double Lx, double Ly) : x_(Jx, Lx), y_(Jy, Ly) {}

    /// Jx = J and Jy chosen so that dy is as close as possible to dx.
    static Grid2D isotropic(long J, double Lx, double Ly) {
        require(J >= 2, "Grid2D::isotropic: J must be >= 2");
        const long Jy = std::lround(Ly / Lx * static_cast<double>(J - 1)) + 1;
        return Grid2D(J, std::max(Jy, 2L), Lx, Ly);
    }

    [[nodiscard]] long Jx() const noexcept { return x_.J(); }
    [[nodiscard]] long Jy() const noexcept { return y_.J(); }
    [[nodiscard]] double Lx() const noexcept { return x_.L(); }
    [[nodiscard]] double Ly() const noexcept { return y_.L(); }
    [[nodiscard]] double dx() const noexcept { return x_.dx(); }
    [[nodiscard]] double dy() const noexcept { return y_.dx(); }
    [[nodiscard]] const Grid1D& x_axis() const noexcept { return x_; }
    [[nodiscard]] const Grid1D& y_axis() const noexcept { return y_; }
    [[nodiscard]] std::size_t size() const noexcept {
        return static_cast<std::size_t>(Jx()) * static_cast<std::size_t>(Jy());
    }
    /// Row-major, x fastest.
    [[nodiscard]] std::size_t index(long i, long j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(Jx()) + static_cast<std::size_t>(i);
    }

    friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
        return a.x_ == b.x_ && a.y_ == b.y_;
    }

private:
    Grid1D x_;
    Grid1D y_;
};

/// Nodal values on a Grid2D, stored row-major with x fastest: value(i, j) at index j*Jx + i.
class Field2D {
public:
    explicit Field2D(const Grid2D& g, double fill = 0.0) : grid_(g), v_(g.size(), fill) {}

    Field2D(const Grid2D& g, std::vector<double> values) : grid_(g), v_(std::move(values)) {
        require(v_.size() == g.size(), "Field2D: size does not match grid");
        for (double x : v_) require(std::isfinite(x), "Field2D: non-finite entry");
    }

    [[nodiscard]] const Grid2D& grid() const noexcept { return grid_; }
    [[nodiscard]] std::size_t size() const noexcept { return v_.size(); }
    [[nodiscard]] double& operator()(long i, long j) noexcept { return v_[grid_.index(i, j)]; }
    [[nodiscard]] double operator()(long i, long j) const noexcept { return v_[grid_.index(i, j)]; }
    [[nodiscard]] double& operator[](std::size_t k) noexcept { return v_[k]; }
    [[nodiscard]] double operator[](std::size_t k) const noexcept { return v_[k]; }
    [[nodiscard]] std::span<double> values() & noexcept { return v_; }
    [[nodiscard]] std::span<const double> values() const& noexcept { return v_; }
    // A temporary hands over its storage so range-for over it stays valid.
    [[nodiscard]] std::vector<double> values() && noexcept { return std::move(v_); }

    void add_constant(double c) noexcept {
        for (double& x : v_) x += c;
    }

    Field2D& operator-=(const Field2D& o) {
        require(grid_ == o.grid_, "Field2D: grid mismatch");
        for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
        return *this;
    }

private:
    Grid2D grid_;
    std::vector<double> v_;
};

inline Field2D operator-(Field2D a, const Field2D& b) { return a -= b; }

inline double inner2d(const Field2D& v, const Field2D& w) {
    require(v.grid() == w.grid(), "inner2d: grid mismatch");
    return detail::dot(v.values(), w.values()) / static_cast<double>(v.grid().size());
}

inline double mean2d(const Field2D& v) {
    return detail::sum(v.values()) / static_cast<double>(v.grid().size());
}

inline double norm2d(const Field2D& v) { return std::sqrt(inner2d(v, v)); }

template <class F>
Field2D project2d(const Grid2D& g, F&& w) {
    std::vector<double> out(g.size());
    for (long j = 0; j < g.Jy(); ++j) {
        const double y = g.y_axis().node(j);
        for (long i = 0; i < g.Jx(); ++i) out[g.index(i, j)] = w(g.x_axis().node(i), y);
    }
    return Field2D(g, std::move(out));
}

}  // namespace nheat
