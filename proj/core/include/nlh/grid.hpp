#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nlh {

/// Nodes 0 = rho_0 < rho_1 < ... < rho_N = rho_max on the half-line.
class RadialGrid {
public:
    enum class Spacing { Uniform };

    static constexpr double kDefaultRhoMax = 16.0;
    static constexpr double kDefaultSpacing = 0.01;

    /// Uniform grid; the node count is round(rho_max / spacing) + 1.
    /// Throws DomainError if rho_max < 10 or fewer than 100 intervals result.
    static RadialGrid uniform(double rho_max = kDefaultRhoMax, double spacing = kDefaultSpacing);

    /// Uniform grid without the rho_max/size floor, for oracles and small tests.
    static RadialGrid uniform_unchecked(double rho_max, double spacing);

    std::span<const double> nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double rho_max() const { return nodes_.back(); }
    /// Uniform spacing h.
    double spacing() const { return h_; }
    Spacing spacing_policy() const { return Spacing::Uniform; }

private:
    RadialGrid(std::vector<double> nodes, double h) : nodes_(std::move(nodes)), h_(h) {}

    std::vector<double> nodes_;
    double h_;
};

}  // namespace nlh
