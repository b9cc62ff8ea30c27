#pragma once

#include <functional>
#include <span>

namespace histtools {

/**
 * Adaptive Gauss-Kronrod integral of f over [a, b].
 *
 * `hints` are points where f may have a kink or jump; the interval is split
 * there so each panel is smooth.  Hints outside (a, b) are ignored.
 */
double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> hints = {}, double abs_tol = 1e-10);

}  // namespace histtools
