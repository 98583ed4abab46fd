#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace bergerflow {

/// Three-point finite-difference weights (left, centre, right neighbour).
struct Stencil3 {
    double left = 0.0;
    double centre = 0.0;
    double right = 0.0;
};

/// Staggered radial grid on (0, x_max]. No node sits on the origin: node 0 is
/// paired with a mirror ghost at -x_0 whose value is fixed by field parity.
///
/// Stencil weights are precomputed per node so that differentiation is a
/// single pass over three neighbours. Node n-1 uses one-sided stencils.
class Grid {
public:
    /// Wraps an explicit node set. Nodes must be positive, strictly increasing,
    /// and keep adjacent spacing ratios within [1/2, 2] (ghost gap included).
    static Grid from_nodes(std::vector<double> nodes, double x_max, double cluster_factor = 1.0);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    double operator[](std::size_t i) const noexcept { return nodes_[i]; }

    /// Outer edge of the last cell; the last node sits half a cell inside it.
    double x_max() const noexcept { return x_max_; }
    double cluster_factor() const noexcept { return cluster_factor_; }

    /// Spacing between node i and its left neighbour (the ghost for i = 0).
    double left_gap(std::size_t i) const noexcept {
        return i == 0 ? 2.0 * nodes_[0] : nodes_[i] - nodes_[i - 1];
    }
    double min_gap() const noexcept { return min_gap_; }

    /// Interior weights, valid for i in [0, n-2]; the left weight of node 0
    /// multiplies the ghost value.
    const Stencil3& d1(std::size_t i) const noexcept { return d1_[i]; }
    const Stencil3& d2(std::size_t i) const noexcept { return d2_[i]; }

    /// One-sided weights at the outer node over nodes n-1, n-2, n-3(, n-4).
    const std::array<double, 3>& d1_outer() const noexcept { return d1_outer_; }
    const std::array<double, 4>& d2_outer() const noexcept { return d2_outer_; }

private:
    Grid() = default;
    void build_stencils();

    std::vector<double> nodes_;
    double x_max_ = 0.0;
    double cluster_factor_ = 1.0;
    double min_gap_ = 0.0;
    std::vector<Stencil3> d1_;
    std::vector<Stencil3> d2_;
    std::array<double, 3> d1_outer_{};
    std::array<double, 4> d2_outer_{};
};

/// Stretching map used by build_grid: u in [0, 1] -> fraction of x_max.
/// With cluster_factor k > 1 this is (k^u - 1) / (k - 1), whose end-slope
/// ratio is exactly k; k = 1 gives the identity.
double stretch_map(double u, double cluster_factor);

/// Grid with nodes x_max * stretch_map((i + 1/2) / n). Requires n >= 16,
/// x_max > 0 and cluster_factor >= 1 (all finite).
Grid build_grid(std::size_t n_nodes, double x_max, double cluster_factor);

/// Fornberg finite-difference weights for derivative `order` at `x0` from `points`.
std::vector<double> fd_weights(double x0, std::span<const double> points, int order);

}  // namespace bergerflow
