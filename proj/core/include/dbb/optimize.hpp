#pragma once

#include <functional>

namespace dbb::opt {

/// Golden-section search for the maximum of a unimodal f on [a, b].
double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace dbb::opt
