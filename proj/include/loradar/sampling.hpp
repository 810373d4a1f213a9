// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <span>
#include <vector>

#include "loradar/detail/rng.hpp"
#include "loradar/errors.hpp"

namespace loradar {

enum class SamplingKind { Random, Uniform };

/// A strictly increasing set of sample indices on the full-rate grid
/// {0, ..., base-1}. Doubles as the row-selection measurement operator:
/// applying it to a length-base vector keeps exactly the indexed entries.
struct SamplingIndexSet {
    std::vector<int> indices;
    int base = 0;
    SamplingKind kind = SamplingKind::Random;

    int count() const { return static_cast<int>(indices.size()); }
};

/// Uniformly random count-subset of {0, ..., base-1}, sorted.
inline SamplingIndexSet draw_random_set(int count, int base, detail::Rng& rng) {
    if (count > base || count < 1) {
        throw Error(ErrorCode::SamplingOverrun, "requested subset larger than base grid");
    }
    // partial Fisher-Yates over the index pool
    std::vector<int> pool(base);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < count; ++i) {
        const int j = i + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(base - i)));
        std::swap(pool[i], pool[j]);
    }
    SamplingIndexSet set;
    set.indices.assign(pool.begin(), pool.begin() + count);
    std::sort(set.indices.begin(), set.indices.end());
    set.base = base;
    set.kind = SamplingKind::Random;
    return set;
}

/// Evenly strided indices {0, s, 2s, ...} with s = floor(base/count).
/// When count does not divide base this truncates rather than spreading
/// the remainder.
inline SamplingIndexSet uniform_set(int count, int base) {
    if (count > base || count < 1) {
        throw Error(ErrorCode::SamplingOverrun, "requested subset larger than base grid");
    }
    const int stride = base / count;
    SamplingIndexSet set;
    set.indices.resize(count);
    for (int i = 0; i < count; ++i) set.indices[i] = i * stride;
    set.base = base;
    set.kind = SamplingKind::Uniform;
    return set;
}

template <typename T>
std::vector<T> apply_selection(const SamplingIndexSet& set, std::span<const T> x) {
    if (static_cast<int>(x.size()) != set.base) {
        throw Error(ErrorCode::LengthMismatch, "selection input length must equal base");
    }
    std::vector<T> out(set.indices.size());
    for (std::size_t i = 0; i < set.indices.size(); ++i) out[i] = x[set.indices[i]];
    return out;
}

template <typename T>
std::vector<T> apply_selection(const SamplingIndexSet& set, const std::vector<T>& x) {
    return apply_selection(set, std::span<const T>(x));
}

}  // namespace loradar
