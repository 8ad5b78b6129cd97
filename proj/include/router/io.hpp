#pragma once

#include <string>
#include <vector>

#include "router/analysis.hpp"
#include "router/ensemble.hpp"
#include "router/pulses.hpp"

namespace router {

// Every emitter embeds the resolved config echo and tool version as leading
// comment lines (CSV) or top-level fields (JSON) so outputs are traceable.

std::string format_double(double v);

void write_spectrum_csv(const std::string& path, const SpectrumTable& tbl,
                        const std::string& config_echo);

// Columns: delta_i_mhz, refl_db, trans_db; masked points are empty cells.
void write_extinction_csv(const std::string& path, const ExtinctionCurve& refl,
                          const ExtinctionCurve& trans,
                          const std::string& config_echo);

void write_switching_csv(const std::string& path, const SwitchingCurve& curve,
                         const std::string& config_echo);

void write_pulse_csv(const std::string& path, const PulseResult& res,
                     const std::string& config_echo);

std::string fit_report_json(const std::string& model, const FitResult& fit,
                            const std::vector<std::string>& param_names);

// Switching-curve data for calibration: header "energy_fj,r,t" required.
// Throws ConfigError naming the offending row.
SwitchingCurve read_switching_csv(const std::string& path);

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series);

}  // namespace router
