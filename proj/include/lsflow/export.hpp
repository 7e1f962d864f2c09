#ifndef LSFLOW_EXPORT_HPP
#define LSFLOW_EXPORT_HPP

#include <optional>
#include <string>

#include "lsflow/flow.hpp"
#include "lsflow/metrics.hpp"

namespace lsflow {

// Every number is written with "%.17g"; lines end in '\n'.

// Header "t,x_1_1,...,x_N_m" (1-based node, then dimension), one row per sample.
std::string trajectory_csv(const Trajectory& traj);
// Header "t,value".
std::string series_csv(const ErrorSeries& series);
// Reads a two-column "t,value" file (header required). Throws std::runtime_error
// with the offending line number.
ErrorSeries parse_series_csv(const std::string& text, const std::string& label = "series");

// {"slope":...,"intercept":...,"t_lo":...,"t_hi":...,"rms_residual":...} on one line.
std::string slope_fit_json(const SlopeFit& fit);

// Log-log plot of the series with the fitted line overlaid.
std::string loglog_svg(const ErrorSeries& series, const std::optional<SlopeFit>& fit);

std::string format_number(double v);

}  // namespace lsflow

#endif  // LSFLOW_EXPORT_HPP
