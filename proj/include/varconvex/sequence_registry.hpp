#pragma once

#include <cmath>
#include <string>

#include "varconvex/epi_limits.hpp"
#include "varconvex/grid.hpp"
#include "varconvex/test_function.hpp"

namespace varconvex {

/// One registered sequence: the terms, the declared limit, and (for point-set
/// sequences) the set generator.
struct SequenceSpec {
    FunctionSequence sequence;
    TestFunction limit;
};

namespace detail {

inline TestFunction scalar_fn(std::string name,
                              std::function<ExtReal(double)> g) {
    TestFunction f;
    f.name = std::move(name);
    f.dim = 1;
    f.eval = [g](const Vec& x) { return g(x[0]); };
    f.domain_lo = {-8.0};
    f.domain_hi = {8.0};
    return f;
}

}  // namespace detail

/// Compiled-in generators for the shipped sequence manifests.
inline SequenceSpec make_function_sequence(const std::string& generator_id,
                                           int k_max, const Box& box) {
    SequenceSpec spec;
    spec.sequence.k_max = k_max;
    if (generator_id == "uniform_shift_quadratic") {
        spec.sequence.generator = [](int k) {
            return detail::scalar_fn("shift", [k](double x) {
                return ExtReal(x * x + 1.0 / k);
            });
        };
        spec.limit = detail::scalar_fn("square", [](double x) {
            return ExtReal(x * x);
        });
    } else if (generator_id == "quadratic_truncation") {
        spec.sequence.generator = [](int k) {
            return detail::scalar_fn("trunc", [k](double x) {
                return ExtReal(std::min(x * x, static_cast<double>(k)));
            });
        };
        spec.limit = detail::scalar_fn("square", [](double x) {
            return ExtReal(x * x);
        });
    } else if (generator_id == "moving_indicator_snapped") {
        double spacing = box.spacing(0);
        spec.sequence.generator = [spacing](int k) {
            double s = spacing * std::floor(2.0 / (k * spacing));
            return detail::scalar_fn("spike", [s](double x) {
                return std::abs(x - s) < 1e-12 ? ExtReal(0.0)
                                               : ExtReal::infinity();
            });
        };
        spec.limit = detail::scalar_fn("spike_origin", [](double x) {
            return x == 0.0 ? ExtReal(0.0) : ExtReal::infinity();
        });
    } else if (generator_id == "power_to_abs") {
        spec.sequence.generator = [](int k) {
            return detail::scalar_fn("power", [k](double x) {
                return ExtReal(std::pow(std::abs(x), 1.0 + 1.0 / k));
            });
        };
        spec.limit = detail::scalar_fn("abs", [](double x) {
            return ExtReal(std::abs(x));
        });
    } else if (generator_id == "smooth_to_kink") {
        spec.sequence.generator = [](int k) {
            return detail::scalar_fn("smooth", [k](double x) {
                return ExtReal(std::sqrt(x * x + 1.0 / (k * k)));
            });
        };
        spec.limit = detail::scalar_fn("abs", [](double x) {
            return ExtReal(std::abs(x));
        });
    } else if (generator_id == "argmin_shift") {
        spec.sequence.generator = [](int k) {
            return detail::scalar_fn("shifted_well", [k](double x) {
                double d = x - 1.0 / k;
                return ExtReal(d * d);
            });
        };
        spec.limit = detail::scalar_fn("square", [](double x) {
            return ExtReal(x * x);
        });
    } else {
        throw std::invalid_argument("unknown function-sequence generator: " +
                                    generator_id);
    }
    return spec;
}

inline std::vector<std::vector<Vec>> make_point_set_sequence(
    const std::string& generator_id, int k_max) {
    std::vector<std::vector<Vec>> seq;
    if (generator_id == "oscillating_pair") {
        for (int k = 1; k <= k_max; ++k)
            seq.push_back({{k % 2 == 0 ? 1.0 : -1.0}});
    } else {
        throw std::invalid_argument("unknown point-set generator: " +
                                    generator_id);
    }
    return seq;
}

}  // namespace varconvex
