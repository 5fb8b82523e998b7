#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "seqdyn/approx/dataset.hpp"

namespace seqdyn::io {

/*
 * Binary dataset cache, all fields little-endian:
 *
 *   char[8]  magic "SQDSET01"
 *   u64      D (samples)
 *   u64      n (dimension)
 *   u64      seed
 *   f64[n*D] x, sample-major (x_1 of sample 0, x_2 of sample 0, ...)
 *   f64[n*D] y, same order
 */
inline constexpr std::array<char, 8> kDatasetMagic{'S', 'Q', 'D', 'S', 'E', 'T', '0', '1'};

namespace detail {

template <typename T>
void put_le(std::ostream& os, T v)
{
    static_assert(sizeof(T) == 8);
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char buf[8];
    for (int k = 0; k < 8; ++k)
        buf[k] = static_cast<unsigned char>(bits >> (8 * k));
    os.write(reinterpret_cast<const char*>(buf), 8);
}

template <typename T>
T get_le(std::istream& is)
{
    static_assert(sizeof(T) == 8);
    unsigned char buf[8];
    if (!is.read(reinterpret_cast<char*>(buf), 8))
        throw PreconditionError("dataset cache: truncated file");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
        bits |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    T v;
    std::memcpy(&v, &bits, 8);
    return v;
}

} // namespace detail

inline void write_dataset(const std::string& path, const approx::Dataset& ds)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw std::runtime_error("cannot open " + path + " for writing");
    os.write(kDatasetMagic.data(), kDatasetMagic.size());
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(ds.size()));
    detail::put_le<std::uint64_t>(os, static_cast<std::uint64_t>(ds.dim()));
    detail::put_le<std::uint64_t>(os, ds.seed);
    // column-major storage is already sample-major for a dim x D matrix
    for (const Mat* m : {&ds.x, &ds.y})
        for (Eigen::Index k = 0; k < m->size(); ++k)
            detail::put_le<double>(os, m->data()[k]);
    if (!os)
        throw std::runtime_error("write to " + path + " failed");
}

inline approx::Dataset read_dataset(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw PreconditionError("cannot open " + path);
    std::array<char, 8> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != kDatasetMagic)
        throw PreconditionError(path + ": not a dataset cache");
    const auto d = detail::get_le<std::uint64_t>(is);
    const auto n = detail::get_le<std::uint64_t>(is);
    approx::Dataset ds;
    ds.seed = detail::get_le<std::uint64_t>(is);
    require(n >= 1 && n < (1u << 20) && d < (std::uint64_t{1} << 40), path + ": implausible header");
    ds.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    ds.y.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (Mat* m : {&ds.x, &ds.y})
        for (Eigen::Index k = 0; k < m->size(); ++k)
            m->data()[k] = detail::get_le<double>(is);
    if (is.peek() != std::char_traits<char>::eof())
        throw PreconditionError(path + ": trailing bytes after the dataset");
    return ds;
}

} // namespace seqdyn::io
