#pragma once

#include <vector>

#include "seqdyn/core/types.hpp"

namespace seqdyn {

/// Axis-aligned box [lo, hi].
struct Box {
    Vec lo;
    Vec hi;

    static Box cube(int n, double lo, double hi)
    {
        return {Vec::Constant(n, lo), Vec::Constant(n, hi)};
    }
    int dim() const { return static_cast<int>(lo.size()); }
};

/// Calls visit(x) for each node of a regular grid with `res` points per axis.
template <typename Visitor>
void for_each_grid_node(const Box& box, int res, Visitor&& visit)
{
    require(res >= 1, "grid resolution must be >= 1");
    const int n = box.dim();
    std::vector<int> idx(n, 0);
    Vec x(n);
    while (true) {
        for (int d = 0; d < n; ++d)
            x[d] = res == 1 ? 0.5 * (box.lo[d] + box.hi[d])
                            : box.lo[d] + (box.hi[d] - box.lo[d]) * idx[d] / (res - 1);
        visit(static_cast<const Vec&>(x));
        int d = 0;
        while (d < n && ++idx[d] == res)
            idx[d++] = 0;
        if (d == n)
            break;
    }
}

} // namespace seqdyn
