#pragma once

#include <string>
#include <vector>

namespace tidykg {

// s_0 = x_0; s_t = alpha * x_t + (1 - alpha) * s_{t-1}. alpha = 1 returns the
// input unchanged.
std::vector<double> ema_smooth(const std::vector<double>& values, double alpha);

// Reads a metrics CSV (kMetricsHeader layout) and writes one SVG per
// (level, metric) with an EMA-smoothed curve per knowledge source, averaged
// across runs. Returns the written file paths. Empty CSV is fatal.
std::vector<std::string> plot_curves(const std::string& metrics_csv_path, double alpha,
                                     const std::string& out_dir);

}  // namespace tidykg
