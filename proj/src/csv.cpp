#include "srl/csv.hpp"

#include <cstdio>
#include <fstream>

#include "srl/errors.hpp"

namespace srl {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimulationError("cannot open output file: " + path);
    return out;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<double>& values) {
    if (columns.empty() || values.size() % columns.size() != 0)
        throw ConfigError("csv table shape mismatch");
    auto out = open_out(path);
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << "\n";
    const std::size_t ncols = columns.size();
    for (std::size_t i = 0; i < values.size(); i += ncols) {
        for (std::size_t c = 0; c < ncols; ++c)
            out << (c ? "," : "") << format_double(values[i + c]);
        out << "\n";
    }
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    auto out = open_out(path);
    out << "t";
    for (std::size_t k = 0; k < traj.actions_per_player.size(); ++k)
        for (int a = 0; a < traj.actions_per_player[k]; ++a)
            out << ",y_" << (k + 1) << "_" << (a + 1);
    for (std::size_t k = 0; k < traj.actions_per_player.size(); ++k)
        for (int a = 0; a < traj.actions_per_player[k]; ++a)
            out << ",x_" << (k + 1) << "_" << (a + 1);
    out << "\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        out << format_double(traj.times[i]);
        const auto y = traj.scores_at(i);
        const auto x = traj.strategies_at(i);
        for (double v : y) out << "," << format_double(v);
        for (double v : x) out << "," << format_double(v);
        out << "\n";
    }
}

}  // namespace srl
