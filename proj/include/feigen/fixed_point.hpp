#pragma once

#include "feigen/series.hpp"

namespace feigen {

/// A solved instance of the fixed-point equation f(z) = -(1/lambda) f(f(lambda z)).
struct RenormFixedPoint {
    TruncatedEvenSeries series;
    double lambda = 0.0;        // -f(1)
    double x0 = 0.0;            // first positive zero of f
    double residual_sup = 0.0;  // sup of the residual over the validation samples
    int newton_iters = 0;

    int ell() const noexcept { return series.ell(); }
    double rho() const noexcept { return series.trusted_radius(); }
};

}  // namespace feigen
