#include "tidykg/plot.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include "tidykg/errors.hpp"
#include "tidykg/harness.hpp"
#include "tidykg/text.hpp"

namespace tidykg {

namespace fs = std::filesystem;

std::vector<double> ema_smooth(const std::vector<double>& values, double alpha) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = i == 0 ? values[0] : alpha * values[i] + (1.0 - alpha) * out[i - 1];
    }
    return out;
}

namespace {

struct MetricRow {
    int run = 0, episode = 0;
    std::string level, source;
    double score = 0.0, steps = 0.0;
};

std::vector<MetricRow> read_metrics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open metrics CSV: " + path);
    std::string header;
    if (!std::getline(in, header) || strip(header) != kMetricsHeader) {
        throw DataError("metrics CSV missing required header: " + path);
    }
    std::vector<MetricRow> rows;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (strip(line).empty()) continue;
        std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 9) {
            throw DataError("metrics CSV line " + std::to_string(line_no) + ": expected 9 columns");
        }
        MetricRow row;
        row.run = std::stoi(cols[0]);
        row.episode = std::stoi(cols[1]);
        row.level = cols[2];
        row.source = cols[3];
        row.score = std::stod(cols[4]);
        row.steps = std::stod(cols[5]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("metrics CSV has no data rows: " + path);
    return rows;
}

struct Series {
    std::vector<double> values;  // indexed by episode-1, averaged across runs
};

// Fixed palette; cycled when there are more sources than colors.
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string svg_plot(const std::string& title, const std::string& y_label,
                     const std::map<std::string, std::vector<double>>& series) {
    const double width = 640, height = 420;
    const double ml = 56, mr = 16, mt = 32, mb = 40;
    const double pw = width - ml - mr, ph = height - mt - mb;

    std::size_t n = 0;
    double ymin = 1e300, ymax = -1e300;
    for (const auto& [_, values] : series) {
        n = std::max(n, values.size());
        for (double v : values) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (ymax <= ymin) ymax = ymin + 1.0;
    const double yspan = ymax - ymin;

    auto x_of = [&](std::size_t i) {
        return ml + (n <= 1 ? 0.0 : pw * static_cast<double>(i) / static_cast<double>(n - 1));
    };
    auto y_of = [&](double v) { return mt + ph * (1.0 - (v - ymin) / yspan); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(width, 0) +
           "\" height=\"" + format_double(height, 0) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + format_double(width / 2, 1) + "\" y=\"20\" text-anchor=\"middle\" "
           "font-family=\"sans-serif\" font-size=\"14\">" + title + "</text>\n";
    // axes
    svg += "<line x1=\"" + format_double(ml, 1) + "\" y1=\"" + format_double(mt, 1) + "\" x2=\"" +
           format_double(ml, 1) + "\" y2=\"" + format_double(mt + ph, 1) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(ml, 1) + "\" y1=\"" + format_double(mt + ph, 1) +
           "\" x2=\"" + format_double(ml + pw, 1) + "\" y2=\"" + format_double(mt + ph, 1) +
           "\" stroke=\"black\"/>\n";
    // y tick labels
    for (int k = 0; k <= 4; ++k) {
        double v = ymin + yspan * k / 4.0;
        svg += "<text x=\"" + format_double(ml - 6, 1) + "\" y=\"" +
               format_double(y_of(v) + 4, 1) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
               format_double(v, 2) + "</text>\n";
    }
    svg += "<text x=\"" + format_double(ml + pw / 2, 1) + "\" y=\"" +
           format_double(height - 8, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">episode</text>\n";
    svg += "<text x=\"14\" y=\"" + format_double(mt + ph / 2, 1) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" "
           "transform=\"rotate(-90 14 " + format_double(mt + ph / 2, 1) + ")\">" + y_label +
           "</text>\n";

    int color = 0;
    double legend_y = mt + 6;
    for (const auto& [name, values] : series) {
        const char* stroke = kPalette[color % 6];
        std::string points;
        for (std::size_t i = 0; i < values.size(); ++i) {
            points += format_double(x_of(i), 2) + "," + format_double(y_of(values[i]), 2) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(stroke) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        svg += "<text x=\"" + format_double(ml + pw - 4, 1) + "\" y=\"" +
               format_double(legend_y, 1) + "\" text-anchor=\"end\" fill=\"" + stroke +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + name + "</text>\n";
        legend_y += 14;
        ++color;
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace

std::vector<std::string> plot_curves(const std::string& metrics_csv_path, double alpha,
                                     const std::string& out_dir) {
    if (alpha <= 0.0 || alpha > 1.0) throw UsageError("plot: alpha must be in (0,1]");
    std::vector<MetricRow> rows = read_metrics(metrics_csv_path);
    fs::create_directories(out_dir);

    // (level, source, episode) -> mean across runs
    std::map<std::string, std::map<std::string, std::map<int, std::pair<double, double>>>> sums;
    std::map<std::string, std::map<std::string, std::map<int, int>>> counts;
    for (const MetricRow& row : rows) {
        auto& cell = sums[row.level][row.source][row.episode];
        cell.first += row.score;
        cell.second += row.steps;
        counts[row.level][row.source][row.episode] += 1;
    }

    std::vector<std::string> written;
    for (const auto& [level, by_source] : sums) {
        std::map<std::string, std::vector<double>> score_series, steps_series;
        for (const auto& [source, by_episode] : by_source) {
            std::vector<double> scores, steps;
            for (const auto& [episode, cell] : by_episode) {
                int c = counts[level][source][episode];
                scores.push_back(cell.first / c);
                steps.push_back(cell.second / c);
            }
            score_series[source] = ema_smooth(scores, alpha);
            steps_series[source] = ema_smooth(steps, alpha);
        }
        std::string score_path = (fs::path(out_dir) / (level + "_score.svg")).string();
        std::string steps_path = (fs::path(out_dir) / (level + "_steps.svg")).string();
        std::ofstream(score_path, std::ios::binary)
            << svg_plot(level + ": normalized score", "normalized score", score_series);
        std::ofstream(steps_path, std::ios::binary)
            << svg_plot(level + ": steps", "steps", steps_series);
        written.push_back(score_path);
        written.push_back(steps_path);
    }
    return written;
}

}  // namespace tidykg
