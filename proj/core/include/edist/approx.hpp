#pragma once

#include <cstddef>
#include <vector>

#include "edist/empirical.hpp"
#include "edist/moments.hpp"

namespace edist {

/// Per-feature derived moments of one side, unpacked from a summary.
struct SideMoments {
    std::vector<double> mean;
    std::vector<double> variance;
    std::vector<double> skewness;
    std::vector<double> kurtosis; // excess

    static SideMoments from_summary(const MomentSummary& s);
    std::size_t dim() const { return mean.size(); }
};

/// Aggregates feeding the moment-based distance formulas for a pair of sides:
///   nu_xy = sum_i (vx_i + vy_i + dmu_i^2)      total second-moment scale
///   c4xy  = sum_i (vx_i^2 g4x_i + vy_i^2 g4y_i)
///   c3xy  = sum_i (vx_i^{3/2} g3x_i - vy_i^{3/2} g3y_i)
///   dmu1  = sum_i dmu_i,  dmu2 = sum_i dmu_i^2,  dmu_i = mx_i - my_i
/// Within-side aggregates are the same quantities for the pair (s, s).
struct ApproxInputs {
    std::size_t d = 0;
    double nu_xy = 0.0;
    double vsum = 0.0; // sum_i (vx_i + vy_i) = nu_xy - dmu2, tracked exactly
    double c4xy = 0.0;
    double c3xy = 0.0;
    double dmu1 = 0.0;
    double dmu2 = 0.0;

    static ApproxInputs from(const SideMoments& x, const SideMoments& y);
    static ApproxInputs from_1d(double mu_x, double var_x, double skew_x, double kurt_x,
                                double mu_y, double var_y, double skew_y, double kurt_y);
};

/// Second-order expansion of E|X-X'| around the mean squared gap (1-d):
/// sqrt(2)*sigma*(1 - (g4+4)/16), clamped at 0 with a flag if the kurtosis
/// correction overshoots.
double taylor_exx_1d(double var, double kurt, EstimateFlags* flags = nullptr);

/// 1-d cross term sqrt(nu)*(1 - (C4 + 4*C3*dmu + 2 nu^2 - 2 dmu^4)/(8 nu^2)).
/// Degenerate nu = 0 yields 0 with a flag.
double taylor_exy_1d(const ApproxInputs& in, EstimateFlags* flags = nullptr);

/// d-dimensional within term sqrt(nu_xx)*(3/4 - C4X/(8 nu_xx^2)) with
/// nu_xx = 2*sum(var), C4X = 2*sum(var^2 * kurt). Equals the 1-d form at d=1.
double taylor_exx_dd(const MomentSummary& s, EstimateFlags* flags = nullptr);

/// d-dimensional cross term
/// sqrt(nu)*(3/4 - (C4XY + 4*C3XY*dmu1 - 2*dmu2^2)/(8 nu^2)).
double taylor_exy_dd(const MomentSummary& sx, const MomentSummary& sy,
                     EstimateFlags* flags = nullptr);

/// Exact Gaussian within term 2*sigma/sqrt(pi).
double gaussian_exact_exx(double var);

/// Exact Gaussian cross term for 1-d normals:
/// s*sqrt(2/pi)*exp(-Delta^2) + dmu*erf(Delta), s = sqrt(vx+vy),
/// Delta = dmu/sqrt(2(vx+vy)). Both variances zero yields |dmu| exactly.
double gaussian_exact_exy(double mu_x, double var_x, double mu_y, double var_y);

/// Kurtosis-adjusted within term (2/sqrt(pi) - sqrt(2)*g4/16)*sigma,
/// clamped at 0 with a flag if negative.
double adjusted_exx(double var, double kurt, EstimateFlags* flags = nullptr);

/// Kurtosis/skewness-adjusted cross term: the exact-Gaussian value minus
/// (C4 + 4*C3*dmu)/(8*nu^{3/2}); 1-d only; clamped at 0 with a flag.
double adjusted_exy(const ApproxInputs& in, EstimateFlags* flags = nullptr);

/// Standard normal CDF via erfc; absolute error below 1e-15 on [-8, 8].
double normal_cdf(double x);

/// Assembles D^2 = 2*E_xy - E_xx - E_yy from summary moments with every term
/// computed by the chosen method's cross kernel (within terms use the kernel
/// on (s, s), so identical summaries cancel to exactly 0). The coefficient h
/// is attached with the usual clamping rules. gaussian_exact and adjusted
/// require d = 1.
DistanceEstimate energy_from_summaries(const MomentSummary& sx, const MomentSummary& sy,
                                       Method method);

/// Third-order residual diagnostic
/// 3*(2 k6 + 18 s6 g4 + 34 s6 - 20 s6 g3^2) / (48 (2 var)^{5/2}), s6 = var^3.
/// Throws "residual undefined for degenerate" when var = 0.
double residual_r3(double var, double skew, double kurt, double k6);

struct VarianceDiagnostic {
    double value = 0.0;
    bool caveat = false; // negative for platykurtic inputs; reported raw
};

/// Dispersion proxy var*g4/8 for the distance kernel; negative values are
/// reported raw with the caveat flag set.
VarianceDiagnostic variance_diagnostic(double var, double kurt);

} // namespace edist
