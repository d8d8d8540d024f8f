// Monte-Carlo mean estimation kernels.
//
// Two implementations share one contract:
//   Exec::serial    plain loop over samples, one running accumulator; kept as
//                   the reference the parallel kernel is tested against.
//   Exec::parallel  samples split into fixed chunks, chunks run under OpenMP,
//                   partial moments merged by a pairwise tree in chunk order.
// Chunk boundaries never depend on the thread count, so the parallel result is
// bit-identical for any number of workers.
#pragma once

#include "stopwell/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace stopwell {

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

enum class Exec { serial, parallel };

inline constexpr std::uint64_t kChunkSize = 4096;

/// Running mean / centered second moment for k simultaneous outputs.
class MomentAccumulator {
public:
    explicit MomentAccumulator(std::size_t k = 1) : mean_(k, 0.0), m2_(k, 0.0) {}

    void add(std::span<const double> x) {
        ++n_;
        const double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t j = 0; j < mean_.size(); ++j) {
            const double d = x[j] - mean_[j];
            mean_[j] += d * inv;
            m2_[j] += d * (x[j] - mean_[j]);
        }
    }

    void merge(const MomentAccumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n_);
        const double nb = static_cast<double>(o.n_);
        const double nt = na + nb;
        for (std::size_t j = 0; j < mean_.size(); ++j) {
            const double d = o.mean_[j] - mean_[j];
            mean_[j] += d * nb / nt;
            m2_[j] += o.m2_[j] + d * d * na * nb / nt;
        }
        n_ += o.n_;
    }

    std::uint64_t count() const { return n_; }

    McEstimate estimate(std::size_t j = 0) const {
        McEstimate e;
        e.n = n_;
        e.mean = mean_[j];
        e.std_error = n_ > 1 ? std::sqrt(m2_[j] / static_cast<double>(n_ - 1) / static_cast<double>(n_)) : 0.0;
        return e;
    }

    std::vector<McEstimate> estimates() const {
        std::vector<McEstimate> out;
        out.reserve(mean_.size());
        for (std::size_t j = 0; j < mean_.size(); ++j) out.push_back(estimate(j));
        return out;
    }

private:
    std::uint64_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> m2_;
};

/// Estimates k means from n samples. fn(CounterRng&, std::span<double> out)
/// writes the k sample values for one sample.
template <class Fn>
std::vector<McEstimate> estimate_means(std::uint64_t n, std::size_t k, const RngStream& stream, Fn&& fn,
                                       Exec exec = Exec::parallel) {
    if (n == 0) throw std::invalid_argument("estimate_means: n must be >= 1");
    if (exec == Exec::serial) {
        MomentAccumulator acc(k);
        std::vector<double> buf(k);
        for (std::uint64_t i = 0; i < n; ++i) {
            CounterRng rng(stream, i);
            fn(rng, std::span<double>(buf));
            acc.add(buf);
        }
        return acc.estimates();
    }

    const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<MomentAccumulator> parts(chunks, MomentAccumulator(k));
#pragma omp parallel
    {
        std::vector<double> buf(k);
#pragma omp for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
            const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunkSize;
            const std::uint64_t end = std::min(n, begin + kChunkSize);
            MomentAccumulator& acc = parts[static_cast<std::size_t>(c)];
            for (std::uint64_t i = begin; i < end; ++i) {
                CounterRng rng(stream, i);
                fn(rng, std::span<double>(buf));
                acc.add(buf);
            }
        }
    }
    for (std::size_t width = 1; width < parts.size(); width *= 2) {
        for (std::size_t i = 0; i + width < parts.size(); i += 2 * width) parts[i].merge(parts[i + width]);
    }
    return parts.front().estimates();
}

/// Scalar form: fn(CounterRng&) -> double.
template <class Fn>
McEstimate estimate_mean(std::uint64_t n, const RngStream& stream, Fn&& fn, Exec exec = Exec::parallel) {
    return estimate_means(
               n, 1, stream, [&](CounterRng& rng, std::span<double> out) { out[0] = fn(rng); }, exec)
        .front();
}

}  // namespace stopwell
