/******************************************************************************
 * Project:  standage
 * Purpose:  Small deterministic RNG with a stable cross-platform stream.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <cmath>
#include <cstdint>
#include <span>

#include "core/common.hpp"

namespace standage {

/**
 * splitmix64 stream.  Deliberately not std::mt19937: the exact draw
 * sequence is part of the reproducibility contract for synthetic scenes,
 * so it must not depend on the standard library implementation.
 */
class Rng
{
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /** Uniform in [0, 1) with 53 random bits. */
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /** Standard normal via Box-Muller; draws two uniforms per pair. */
    double normal()
    {
        if (have_spare_)
        {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 == 0.0)
            u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /** Index drawn proportionally to the given non-negative weights. */
    std::size_t weighted_index(std::span<const double> weights)
    {
        double total = 0.0;
        for (const double w : weights)
            total += w;
        if (!(total > 0.0))
            throw ValidationError("weighted_index: weights must sum > 0");
        double u = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i)
        {
            u -= weights[i];
            if (u < 0.0)
                return i;
        }
        return weights.size() - 1;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace standage
