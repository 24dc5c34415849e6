#include "cfrl/lognormal.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "cfrl/errors.hpp"

namespace cfrl {

double lognormal_pdf(double x, const LognormalParams& params) {
    if (params.sigma <= 0.0) {
        throw NumericError("lognormal_pdf: sigma must be positive");
    }
    if (!(x > 0.0)) {
        return 0.0;
    }
    const double d = std::log(x) - params.mu;
    const double norm = 1.0 / (x * params.sigma * std::sqrt(2.0 * std::numbers::pi));
    return norm * std::exp(-d * d / (2.0 * params.sigma * params.sigma));
}

LognormalParams fit_lognormal(std::span<const double> samples) {
    if (samples.empty()) {
        throw NumericError("fit_lognormal: no samples");
    }
    std::vector<double> logs;
    logs.reserve(samples.size());
    for (double x : samples) {
        if (!(x > 0.0)) {
            throw NumericError("fit_lognormal: non-positive sample");
        }
        logs.push_back(std::log(x));
    }
    double mean = 0.0;
    for (double l : logs) mean += l;
    mean /= static_cast<double>(logs.size());

    double var = 0.0;
    for (double l : logs) var += (l - mean) * (l - mean);
    var /= static_cast<double>(logs.size());

    if (var <= 0.0) {
        throw NumericError("fit_lognormal: zero variance in log samples");
    }
    return LognormalParams{mean, std::sqrt(var)};
}

}  // namespace cfrl
