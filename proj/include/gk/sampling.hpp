#pragma once

#include <array>
#include <cstdint>
#include <random>

#include "gk/chart.hpp"
#include "gk/twistor.hpp"

namespace gk {

/// Seeded sample-point generator.  Uses std::mt19937_64 with the 53-bit
/// ldexp mapping to doubles, so identical seeds reproduce identical
/// sample sequences on any conforming platform ("mt19937_64/53bit" in
/// reports).
class Sampler {
public:
    explicit Sampler(uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) {
        double t = std::ldexp(static_cast<double>(rng_() >> 11), -53);
        return lo + t * (hi - lo);
    }

    double symmetric(double m) { return uniform(-m, m); }

    int sign() { return (rng_() & 1) ? 1 : -1; }

    /// Interior point of a chart, keeping a fractional margin off the faces.
    std::vector<double> chart_point(const Chart& chart, double margin = 0.05) {
        std::vector<double> p(static_cast<size_t>(chart.dim()));
        for (int i = 0; i < chart.dim(); ++i) {
            double lo = chart.bounds()[static_cast<size_t>(i)][0];
            double hi = chart.bounds()[static_cast<size_t>(i)][1];
            double pad = margin * (hi - lo);
            p[static_cast<size_t>(i)] = uniform(lo + pad, hi - pad);
        }
        return p;
    }

    gcalg::Hyper3 hyper3(int sheet, double range = 1.5) {
        return gcalg::Hyper3::from_chart(sheet, symmetric(range), symmetric(range));
    }

    twistor::TwistorPoint twistor_point(const twistor::TwistorChart& tc,
                                        std::array<double, 2> fiber_range) {
        twistor::TwistorPoint k;
        auto bp = chart_point(tc.base);
        k.x[0] = bp[0];
        k.x[1] = bp[1];
        for (int i = 0; i < 4; ++i) k.x[static_cast<size_t>(2 + i)] = uniform(fiber_range[0], fiber_range[1]);
        return k;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline constexpr const char* kSamplerName = "mt19937_64/53bit";

}  // namespace gk
