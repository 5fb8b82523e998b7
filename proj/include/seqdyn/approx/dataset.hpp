#pragma once

#include <cstdint>
#include <random>

#include "seqdyn/core/grid.hpp"
#include "seqdyn/core/types.hpp"
#include "seqdyn/core/vector_field.hpp"

namespace seqdyn::approx {

/// Samples are stored column-wise: x.col(k) and y.col(k) = g(x.col(k)).
struct Dataset {
    Mat x;
    Mat y;
    std::uint64_t seed = 0;

    int dim() const { return static_cast<int>(x.rows()); }
    int size() const { return static_cast<int>(x.cols()); }
};

/// D i.i.d. uniform points on `box` (mt19937_64 under `seed`) paired with the target values.
inline Dataset sample_dataset(const VectorField& g, const Box& box, int d, std::uint64_t seed)
{
    require(d >= 1, "sample_dataset: D must be >= 1");
    require(box.dim() == g.dim(), "sample_dataset: box and field dimensions differ");
    const int n = g.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Dataset ds{Mat(n, d), Mat(n, d), seed};
    for (int k = 0; k < d; ++k) {
        for (int i = 0; i < n; ++i)
            ds.x(i, k) = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
        ds.y.col(k) = g(ds.x.col(k));
        if (!ds.y.col(k).allFinite())
            throw NumericError("sample_dataset: non-finite target value");
    }
    return ds;
}

} // namespace seqdyn::approx
