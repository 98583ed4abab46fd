#include "bergerflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bergerflow/errors.hpp"

namespace bergerflow {

std::vector<double> fd_weights(double x0, std::span<const double> points, int order) {
    // Fornberg (1988), specialised to returning only the requested order.
    const std::size_t n = points.size();
    const auto m = static_cast<std::size_t>(order);
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = points[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = points[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = points[i] - points[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

Grid Grid::from_nodes(std::vector<double> nodes, double x_max, double cluster_factor) {
    if (nodes.size() < 4) throw InvalidArgument("grid needs at least 4 nodes");
    if (!(nodes.front() > 0.0) || !std::isfinite(nodes.front())) {
        throw InvalidArgument("first grid node must be positive and finite");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!std::isfinite(nodes[i]) || !(nodes[i] > nodes[i - 1])) {
            throw InvalidArgument("grid nodes must be finite and strictly increasing (node " +
                                  std::to_string(i) + ")");
        }
    }
    if (!(x_max >= nodes.back()) || !std::isfinite(x_max)) {
        throw InvalidArgument("x_max must be finite and not below the last node");
    }
    Grid g;
    g.nodes_ = std::move(nodes);
    g.x_max_ = x_max;
    g.cluster_factor_ = cluster_factor;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double ratio = g.left_gap(i) / g.left_gap(i - 1);
        if (ratio < 0.5 || ratio > 2.0) {
            throw InvalidArgument("adjacent grid spacing ratio " + std::to_string(ratio) +
                                  " outside [1/2, 2] at node " + std::to_string(i));
        }
    }
    g.build_stencils();
    return g;
}

void Grid::build_stencils() {
    const std::size_t n = size();
    d1_.resize(n - 1);
    d2_.resize(n - 1);
    min_gap_ = left_gap(0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double hl = left_gap(i);
        const double hr = nodes_[i + 1] - nodes_[i];
        min_gap_ = std::min(min_gap_, hr);
        d1_[i] = {-hr / (hl * (hl + hr)), (hr - hl) / (hl * hr), hl / (hr * (hl + hr))};
        d2_[i] = {2.0 / (hl * (hl + hr)), -2.0 / (hl * hr), 2.0 / (hr * (hl + hr))};
    }
    const std::array<double, 4> pts{nodes_[n - 1], nodes_[n - 2], nodes_[n - 3], nodes_[n - 4]};
    const auto w1 = fd_weights(pts[0], std::span<const double>(pts.data(), 3), 1);
    const auto w2 = fd_weights(pts[0], std::span<const double>(pts.data(), 4), 2);
    std::copy(w1.begin(), w1.end(), d1_outer_.begin());
    std::copy(w2.begin(), w2.end(), d2_outer_.begin());
}

double stretch_map(double u, double cluster_factor) {
    if (cluster_factor == 1.0) return u;
    const double beta = std::log(cluster_factor);
    return std::expm1(beta * u) / std::expm1(beta);
}

Grid build_grid(std::size_t n_nodes, double x_max, double cluster_factor) {
    if (n_nodes < 16) throw InvalidArgument("build_grid: n_nodes must be >= 16");
    if (!std::isfinite(x_max) || !(x_max > 0.0)) {
        throw InvalidArgument("build_grid: x_max must be positive and finite");
    }
    if (!std::isfinite(cluster_factor) || !(cluster_factor >= 1.0)) {
        throw InvalidArgument("build_grid: cluster_factor must be >= 1 and finite");
    }
    std::vector<double> nodes(n_nodes);
    const double n = static_cast<double>(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        nodes[i] = x_max * stretch_map((static_cast<double>(i) + 0.5) / n, cluster_factor);
    }
    return Grid::from_nodes(std::move(nodes), x_max, cluster_factor);
}

}  // namespace bergerflow
