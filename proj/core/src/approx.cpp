#include "edist/approx.hpp"

#include <cmath>
#include <stdexcept>

namespace edist {

namespace {

constexpr double TWO_OVER_SQRT_PI = 1.1283791670955125739; // 2/sqrt(pi)
constexpr double SQRT_TWO = 1.4142135623730950488;
constexpr double SQRT_TWO_OVER_PI = 0.79788456080286535588; // sqrt(2/pi)

double clamp_nonneg(double v, EstimateFlags* flags) {
    if (v < 0.0) {
        if (flags) flags->clamped_nonneg = true;
        return 0.0;
    }
    return v;
}

// Shared assembly of the second-order expansion:
// sqrt(nu) * (3/4 - (c4 + 4*c3*dmu1 - 2*dmu2^2) / (8*nu^2)).
// Within and cross terms both evaluate through this one path, so a pair of
// identical summaries produces bit-identical terms.
double taylor_kernel(const ApproxInputs& in, EstimateFlags* flags) {
    const double nu = in.nu_xy;
    if (nu <= 0.0) {
        if (flags) flags->degenerate = true;
        return 0.0;
    }
    const double corr =
        (in.c4xy + 4.0 * in.c3xy * in.dmu1 - 2.0 * in.dmu2 * in.dmu2) / (8.0 * nu * nu);
    return clamp_nonneg(std::sqrt(nu) * (0.75 - corr), flags);
}

// Exact 1-d Gaussian cross kernel (vsum = var_x + var_y):
// sqrt(vsum)*sqrt(2/pi)*exp(-Delta^2) + dmu*erf(Delta), Delta = dmu/sqrt(2*vsum).
double gaussian_kernel(double vsum, double dmu) {
    if (vsum <= 0.0) {
        return std::abs(dmu);
    }
    const double delta = dmu / std::sqrt(2.0 * vsum);
    return std::sqrt(vsum) * SQRT_TWO_OVER_PI * std::exp(-delta * delta) +
           dmu * std::erf(delta);
}

// Adjusted cross kernel: the Gaussian kernel minus the skewness/kurtosis
// correction (c4 + 4*c3*dmu)/(8*nu^{3/2}).
double adjusted_kernel(const ApproxInputs& in, EstimateFlags* flags) {
    const double base = gaussian_kernel(in.vsum, in.dmu1);
    const double nu = in.nu_xy;
    if (nu <= 0.0) {
        if (flags) flags->degenerate = true;
        return base;
    }
    const double corr = (in.c4xy + 4.0 * in.c3xy * in.dmu1) / (8.0 * nu * std::sqrt(nu));
    return clamp_nonneg(base - corr, flags);
}

} // namespace

SideMoments SideMoments::from_summary(const MomentSummary& s) {
    SideMoments out;
    out.mean.reserve(s.d);
    out.variance.reserve(s.d);
    out.skewness.reserve(s.d);
    out.kurtosis.reserve(s.d);
    for (std::size_t i = 0; i < s.d; ++i) {
        const DerivedMoments m = derived_moments(s, i);
        out.mean.push_back(m.mean);
        out.variance.push_back(m.variance);
        out.skewness.push_back(m.skewness);
        out.kurtosis.push_back(m.kurtosis_excess);
    }
    return out;
}

ApproxInputs ApproxInputs::from(const SideMoments& x, const SideMoments& y) {
    if (x.dim() != y.dim()) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(x.dim()) +
                                    " vs " + std::to_string(y.dim()));
    }
    ApproxInputs in;
    in.d = x.dim();
    for (std::size_t i = 0; i < in.d; ++i) {
        const double vx = x.variance[i];
        const double vy = y.variance[i];
        const double dmu = x.mean[i] - y.mean[i];
        in.vsum += vx + vy;
        in.nu_xy += vx + vy + dmu * dmu;
        in.c4xy += vx * vx * x.kurtosis[i] + vy * vy * y.kurtosis[i];
        const double sx3 = vx * std::sqrt(vx);
        const double sy3 = vy * std::sqrt(vy);
        in.c3xy += sx3 * x.skewness[i] - sy3 * y.skewness[i];
        in.dmu1 += dmu;
        in.dmu2 += dmu * dmu;
    }
    return in;
}

ApproxInputs ApproxInputs::from_1d(double mu_x, double var_x, double skew_x, double kurt_x,
                                   double mu_y, double var_y, double skew_y,
                                   double kurt_y) {
    SideMoments x{{mu_x}, {var_x}, {skew_x}, {kurt_x}};
    SideMoments y{{mu_y}, {var_y}, {skew_y}, {kurt_y}};
    return from(x, y);
}

double taylor_exx_1d(double var, double kurt, EstimateFlags* flags) {
    if (var < 0.0) {
        throw std::invalid_argument("variance must be nonnegative");
    }
    // sqrt(2)*sigma*(1 - (g4+4)/16): the same quantity as the shared kernel's
    // sqrt(2*var)*(3/4 - g4/16) with nu = 2*var, c4 = 2*var^2*g4.
    ApproxInputs in;
    in.d = 1;
    in.vsum = var + var;
    in.nu_xy = var + var;
    in.c4xy = var * var * kurt + var * var * kurt;
    return taylor_kernel(in, flags);
}

double taylor_exy_1d(const ApproxInputs& in, EstimateFlags* flags) {
    return taylor_kernel(in, flags);
}

double taylor_exx_dd(const MomentSummary& s, EstimateFlags* flags) {
    const SideMoments side = SideMoments::from_summary(s);
    return taylor_kernel(ApproxInputs::from(side, side), flags);
}

double taylor_exy_dd(const MomentSummary& sx, const MomentSummary& sy,
                     EstimateFlags* flags) {
    const ApproxInputs in =
        ApproxInputs::from(SideMoments::from_summary(sx), SideMoments::from_summary(sy));
    return taylor_kernel(in, flags);
}

double gaussian_exact_exx(double var) {
    if (var < 0.0) {
        throw std::invalid_argument("variance must be nonnegative");
    }
    return TWO_OVER_SQRT_PI * std::sqrt(var);
}

double gaussian_exact_exy(double mu_x, double var_x, double mu_y, double var_y) {
    if (var_x < 0.0 || var_y < 0.0) {
        throw std::invalid_argument("variance must be nonnegative");
    }
    return gaussian_kernel(var_x + var_y, mu_x - mu_y);
}

double adjusted_exx(double var, double kurt, EstimateFlags* flags) {
    if (var < 0.0) {
        throw std::invalid_argument("variance must be nonnegative");
    }
    return clamp_nonneg((TWO_OVER_SQRT_PI - SQRT_TWO * kurt / 16.0) * std::sqrt(var),
                        flags);
}

double adjusted_exy(const ApproxInputs& in, EstimateFlags* flags) {
    if (in.d != 1) {
        throw std::invalid_argument("adjusted requires d=1");
    }
    return adjusted_kernel(in, flags);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / SQRT_TWO);
}

DistanceEstimate energy_from_summaries(const MomentSummary& sx, const MomentSummary& sy,
                                       Method method) {
    if (sx.d != sy.d) {
        throw std::invalid_argument("dimension mismatch: " + std::to_string(sx.d) +
                                    " vs " + std::to_string(sy.d));
    }
    if (method == Method::empirical) {
        throw std::invalid_argument("empirical method requires raw data");
    }
    if ((method == Method::gaussian_exact || method == Method::adjusted) && sx.d != 1) {
        throw std::invalid_argument(method == Method::gaussian_exact
                                        ? "gaussian_exact requires d=1"
                                        : "adjusted requires d=1");
    }
    const auto start = std::chrono::steady_clock::now();
    const SideMoments mx = SideMoments::from_summary(sx);
    const SideMoments my = SideMoments::from_summary(sy);
    const ApproxInputs cross = ApproxInputs::from(mx, my);
    const ApproxInputs within_x = ApproxInputs::from(mx, mx);
    const ApproxInputs within_y = ApproxInputs::from(my, my);

    DistanceEstimate e;
    e.method = method;
    // Every term goes through the method's one cross kernel; with sx == sy all
    // three inputs are bit-identical, so the statistic cancels to exactly 0.
    auto term = [&](const ApproxInputs& in) {
        switch (method) {
            case Method::taylor:
                return taylor_kernel(in, &e.flags);
            case Method::gaussian_exact:
                return gaussian_kernel(in.vsum, in.dmu1);
            case Method::adjusted:
                return adjusted_kernel(in, &e.flags);
            default:
                return 0.0;
        }
    };
    e.e_xy = term(cross);
    e.e_xx = term(within_x);
    e.e_yy = term(within_y);
    e.value = 2.0 * e.e_xy - e.e_xx - e.e_yy;
    detail::attach_coefficient(e);
    e.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::steady_clock::now() - start);
    return e;
}

double residual_r3(double var, double skew, double kurt, double k6) {
    if (var <= 0.0) {
        throw std::invalid_argument("residual undefined for degenerate");
    }
    const double s6 = var * var * var;
    const double numer =
        3.0 * (2.0 * k6 + 18.0 * s6 * kurt + 34.0 * s6 - 20.0 * s6 * skew * skew);
    const double scale = 2.0 * var; // 2*sigma^2
    const double denom = 48.0 * scale * scale * std::sqrt(scale);
    return numer / denom;
}

VarianceDiagnostic variance_diagnostic(double var, double kurt) {
    if (var < 0.0) {
        throw std::invalid_argument("variance must be nonnegative");
    }
    VarianceDiagnostic out;
    out.value = var * kurt / 8.0;
    out.caveat = out.value < 0.0;
    return out;
}

} // namespace edist
