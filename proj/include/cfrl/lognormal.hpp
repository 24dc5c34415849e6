#pragma once

#include <span>

namespace cfrl {

// Parameters of a lognormal distribution: mean and standard deviation of
// the log of the variable. Defaults are the time-headway fit used by the
// headway reward feature.
struct LognormalParams {
    double mu = 0.4226;
    double sigma = 0.4365;
};

// Density of the lognormal distribution; zero for x <= 0.
double lognormal_pdf(double x, const LognormalParams& params);

// Closed-form maximum-likelihood fit: mu is the mean of ln(x), sigma the
// population standard deviation of ln(x). Throws NumericError when the
// sample set is empty, contains non-positive values, or has zero variance.
LognormalParams fit_lognormal(std::span<const double> samples);

}  // namespace cfrl
