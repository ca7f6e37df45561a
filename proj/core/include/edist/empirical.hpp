#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>

#include "edist/matrix.hpp"

namespace edist {

enum class Method { empirical, taylor, gaussian_exact, adjusted };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct EstimateFlags {
    bool clamped_nonneg = false; // a negative value or expectation was clamped to 0
    bool clamped_unit = false;   // the coefficient exceeded 1 and was clamped
    bool degenerate = false;     // a degenerate input forced a conventional value

    EstimateFlags& operator|=(const EstimateFlags& o) {
        clamped_nonneg |= o.clamped_nonneg;
        clamped_unit |= o.clamped_unit;
        degenerate |= o.degenerate;
        return *this;
    }
    bool operator==(const EstimateFlags&) const = default;
};

/// One distance estimate: the statistic 2*e_xy - e_xx - e_yy together with its
/// three expectation terms, and the normalized coefficient h when it was
/// derived (h = value / (2*e_xy), clamped into [0, 1]).
struct DistanceEstimate {
    double value = 0.0;
    Method method = Method::empirical;
    double e_xy = 0.0;
    double e_xx = 0.0;
    double e_yy = 0.0;
    EstimateFlags flags;
    std::chrono::nanoseconds elapsed{0};
    std::optional<double> h;
};

std::string to_json_string(const DistanceEstimate& e);

/// (1/nm) sum over all cross pairs of the Euclidean distance.
double mean_pairwise_distance(const DatasetMatrix& x, const DatasetMatrix& y,
                              int threads = 1);

/// Empirical energy statistic 2*E_xy - E_xx - E_yy, with the within-sample
/// terms normalized by 1/n^2 over all ordered pairs (zero diagonal included).
/// Identical inputs yield exactly 0; the result is exactly symmetric in its
/// arguments.
DistanceEstimate energy_statistic(const DatasetMatrix& x, const DatasetMatrix& y,
                                  int threads = 1);

/// Full estimate including the normalized coefficient h for any method.
/// Non-empirical methods summarize both sides (order 4) and evaluate the
/// moment-based formulas.
DistanceEstimate energy_estimate(const DatasetMatrix& x, const DatasetMatrix& y,
                                 Method method, int threads = 1);

/// Normalized energy coefficient h in [0, 1]. Throws "identical degenerate
/// inputs" when the denominator vanishes but the statistic does not.
double energy_coefficient(const DatasetMatrix& x, const DatasetMatrix& y,
                          Method method, int threads = 1);

/// Quadratic-form distance 2*E|X-Y|^2 - E|X-X'|^2 - E|Y-Y'|^2 (plug-in with
/// squared Euclidean norms, same V-statistic normalization). Blind to any
/// difference beyond per-feature means and variances.
double quadratic_distance(const DatasetMatrix& x, const DatasetMatrix& y,
                          int threads = 1);

namespace detail {

/// Applies the coefficient rules to a populated estimate: h = value/(2 e_xy)
/// clamped into [0,1]; flags are set only when the raw value lies outside by
/// more than 1e-6. A vanishing denominator yields h = 0 with the degenerate
/// flag when the statistic also vanishes, and throws otherwise.
void attach_coefficient(DistanceEstimate& e);

/// Sum of Euclidean distances over all cross pairs (blocked, deterministic).
double sum_cross_distance(const DatasetMatrix& x, const DatasetMatrix& y, int threads);

/// Sum over ordered within pairs i != j (twice the upper triangle).
double sum_within_distance(const DatasetMatrix& x, int threads);

} // namespace detail

} // namespace edist
