#include "router/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "router/config.hpp"

namespace router {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings everywhere
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

void write_header(std::ofstream& out, const std::string& config_echo) {
    out << "# " << kToolVersion << "\n";
    out << "# config: " << config_echo << "\n";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_spectrum_csv(const std::string& path, const SpectrumTable& tbl,
                        const std::string& config_echo) {
    auto out = open_out(path);
    write_header(out, config_echo);
    out << "delta_i_mhz,r_mean,r_stderr,t_mean,t_stderr\n";
    for (size_t i = 0; i < tbl.grid.size(); ++i) {
        out << format_double(tbl.grid[i]) << ',' << format_double(tbl.r_mean[i])
            << ',' << format_double(tbl.r_stderr[i]) << ','
            << format_double(tbl.t_mean[i]) << ','
            << format_double(tbl.t_stderr[i]) << '\n';
    }
}

void write_extinction_csv(const std::string& path, const ExtinctionCurve& refl,
                          const ExtinctionCurve& trans,
                          const std::string& config_echo) {
    auto out = open_out(path);
    write_header(out, config_echo);
    out << "delta_i_mhz,refl_db,trans_db\n";
    for (size_t i = 0; i < refl.grid.size(); ++i) {
        out << format_double(refl.grid[i]) << ',';
        if (!refl.masked[i]) out << format_double(refl.ratio_db[i]);
        out << ',';
        if (!trans.masked[i]) out << format_double(trans.ratio_db[i]);
        out << '\n';
    }
}

void write_switching_csv(const std::string& path, const SwitchingCurve& curve,
                         const std::string& config_echo) {
    auto out = open_out(path);
    write_header(out, config_echo);
    out << "energy_fj,r,t\n";
    for (size_t i = 0; i < curve.energies_fj.size(); ++i)
        out << format_double(curve.energies_fj[i]) << ','
            << format_double(curve.r[i]) << ',' << format_double(curve.t[i])
            << '\n';
}

void write_pulse_csv(const std::string& path, const PulseResult& res,
                     const std::string& config_echo) {
    auto out = open_out(path);
    write_header(out, config_echo);
    out << "time_ns,refl_mean,refl_counts,trans_mean,trans_counts\n";
    for (size_t i = 0; i < res.time_ns.size(); ++i)
        out << format_double(res.time_ns[i]) << ','
            << format_double(res.refl_env[i]) << ',' << res.refl_counts[i]
            << ',' << format_double(res.trans_env[i]) << ','
            << res.trans_counts[i] << '\n';
}

std::string fit_report_json(const std::string& model, const FitResult& fit,
                            const std::vector<std::string>& param_names) {
    nlohmann::json j;
    j["model"] = model;
    for (size_t i = 0; i < param_names.size(); ++i) {
        j["parameters"][param_names[i]] = {{"value", fit.params[i]},
                                           {"sigma", fit.sigma[i]}};
    }
    j["residual_norm"] = fit.residual_norm;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["degenerate"] = fit.degenerate;
    j["covariance"] = fit.covariance;
    return j.dump(2);
}

SwitchingCurve read_switching_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open data file");
    std::string line;
    int row = 0;
    if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
    ++row;
    while (!line.empty() && line[0] == '#') {  // tolerate our own headers
        if (!std::getline(in, line)) throw ConfigError(path + ": empty file");
        ++row;
    }
    if (line != "energy_fj,r,t")
        throw ConfigError(path + ": row " + std::to_string(row) +
                          ": expected header 'energy_fj,r,t'");
    SwitchingCurve curve;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double vals[3];
        for (int c = 0; c < 3; ++c) {
            if (!std::getline(ss, cell, ','))
                throw ConfigError(path + ": row " + std::to_string(row) +
                                  ": expected 3 columns");
            try {
                size_t used = 0;
                vals[c] = std::stod(cell, &used);
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw ConfigError(path + ": row " + std::to_string(row) +
                                  ": bad number '" + cell + "'");
            }
        }
        curve.energies_fj.push_back(vals[0]);
        curve.r.push_back(vals[1]);
        curve.t.push_back(vals[2]);
    }
    if (curve.energies_fj.empty())
        throw ConfigError(path + ": no data rows");
    return curve;
}

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series) {
    constexpr double W = 640, H = 420, ML = 64, MR = 16, MT = 36, MB = 48;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    }
    if (!std::isfinite(xmin)) { xmin = 0; xmax = 1; ymin = 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double yr = ymax - ymin;
    ymin -= 0.05 * yr;
    ymax += 0.05 * yr;

    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
        << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H
        << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";

    // Axes with 6 ticks each.
    out << "<g stroke=\"black\" fill=\"none\"><path d=\"M" << ML << ' ' << MT
        << " L" << ML << ' ' << H - MB << " L" << W - MR << ' ' << H - MB
        << "\"/></g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double x = xmin + (xmax - xmin) * i / 5.0;
        const double y = ymin + (ymax - ymin) * i / 5.0;
        out << "<line x1=\"" << px(x) << "\" y1=\"" << H - MB << "\" x2=\""
            << px(x) << "\" y2=\"" << H - MB + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(x) << "\" y=\"" << H - MB + 18
            << "\" text-anchor=\"middle\">" << format_double(std::round(x * 1e3) / 1e3)
            << "</text>\n";
        out << "<line x1=\"" << ML - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ML
            << "\" y2=\"" << py(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ML - 8 << "\" y=\"" << py(y) + 4
            << "\" text-anchor=\"end\">" << format_double(std::round(y * 1e3) / 1e3)
            << "</text>\n";
    }
    out << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 10
        << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << (MT + H - MB) / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << (MT + H - MB) / 2 << ")\">" << ylabel << "</text>\n";
    out << "</g>\n";

    int legend_row = 0;
    for (const auto& s : series) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\" points=\"";
        bool pen_down = false;
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i])) { pen_down = false; continue; }
            (void)pen_down;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            pen_down = true;
        }
        out << "\"/>\n";
        const double ly = MT + 14 + 16 * legend_row++;
        out << "<line x1=\"" << W - MR - 120 << "\" y1=\"" << ly << "\" x2=\""
            << W - MR - 96 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << W - MR - 90 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace router
