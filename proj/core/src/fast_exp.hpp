#pragma once

#include <cstdint>
#include <cstring>

namespace fluodecon::detail {

// exp() for batches of nonpositive arguments, written so the compiler can
// vectorize it (no branches, no libm calls). Cody-Waite range reduction with
// the Cephes rational core; accurate to ~1 ulp against std::exp. Arguments
// below -708 clamp to exp(-708) ~ 3e-308, which is indistinguishable from 0
// for kernel weights (the denominator always holds the self-weight 1).
inline void exp_batch_nonpositive(const double* x, double* out, int n) {
    constexpr double kLog2E = 1.4426950408889634073599;
    constexpr double kC1 = 6.93145751953125e-1;  // high part of ln 2
    constexpr double kC2 = 1.42860682030941723212e-6;
    constexpr double kP0 = 1.26177193074810590878e-4;
    constexpr double kP1 = 3.02994407707441961300e-2;
    constexpr double kP2 = 9.99999999999999999910e-1;
    constexpr double kQ0 = 3.00198505138664455042e-6;
    constexpr double kQ1 = 2.52448340349684104192e-3;
    constexpr double kQ2 = 2.27265548208155028766e-1;
    constexpr double kQ3 = 2.00000000000000000005e0;

    for (int i = 0; i < n; ++i) {
        double v = x[i];
        v = (v < -708.0) ? -708.0 : v;
        const double kd = static_cast<double>(static_cast<std::int64_t>(v * kLog2E + (v >= 0 ? 0.5 : -0.5)));
        const double r = (v - kd * kC1) - kd * kC2;
        const double rr = r * r;
        const double p = r * (kP2 + rr * (kP1 + rr * kP0));
        const double q = kQ3 + rr * (kQ2 + rr * (kQ1 + rr * kQ0));
        double e = 1.0 + 2.0 * p / (q - p);
        const std::int64_t bits = (static_cast<std::int64_t>(kd) + 1023) << 52;
        double scale;
        std::memcpy(&scale, &bits, sizeof(scale));
        out[i] = e * scale;
    }
}

}  // namespace fluodecon::detail
