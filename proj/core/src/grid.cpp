#include "nlh/grid.hpp"

#include <cmath>
#include <string>

#include "nlh/errors.hpp"

namespace nlh {

RadialGrid RadialGrid::uniform_unchecked(double rho_max, double spacing) {
    if (!(spacing > 0.0) || !(rho_max > spacing))
        throw DomainError("grid requires 0 < spacing < rho_max");
    const auto n = static_cast<std::size_t>(std::llround(rho_max / spacing));
    const double h = rho_max / static_cast<double>(n);
    std::vector<double> nodes(n + 1);
    for (std::size_t i = 0; i <= n; ++i) nodes[i] = h * static_cast<double>(i);
    nodes[n] = rho_max;
    return RadialGrid(std::move(nodes), h);
}

RadialGrid RadialGrid::uniform(double rho_max, double spacing) {
    if (!(rho_max >= 10.0))
        throw DomainError("rho_max must be >= 10, got " + std::to_string(rho_max));
    RadialGrid g = uniform_unchecked(rho_max, spacing);
    if (g.size() < 101)
        throw DomainError("grid needs at least 100 intervals; decrease the spacing");
    return g;
}

}  // namespace nlh
