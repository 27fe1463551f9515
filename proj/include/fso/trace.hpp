#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fso {

/// One solver iteration as it appears in the trace CSV: batch means of the
/// objective and constraints, the dual state after the update, and the
/// iteration wall time.
struct TraceRecord {
    long iter = 0;
    double objective = 0.0;
    std::vector<double> constraints;
    std::vector<double> lambda;
    double wall_ms = 0.0;
};

namespace detail {
inline std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}
} // namespace detail

/// Write trace rows as CSV: iter, objective, c_1..c_S, lambda_1..lambda_S, ms.
/// The ms column is zeroed unless `timing_column` is set: per-iteration wall
/// time is inherently run-dependent and would break the byte-identical-rerun
/// guarantee of the trace artifact (timing statistics live in the summary and
/// in the bench command instead).
inline void write_trace_csv(const std::string& path, const std::vector<TraceRecord>& rows,
                            std::size_t n_constraints, bool timing_column = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open trace file: " + path);
    out << "iter,objective";
    for (std::size_t s = 1; s <= n_constraints; ++s) out << ",c_" << s;
    for (std::size_t s = 1; s <= n_constraints; ++s) out << ",lambda_" << s;
    out << ",ms\n";
    for (const TraceRecord& r : rows) {
        out << r.iter << ',' << detail::fmt_g(r.objective);
        for (std::size_t s = 0; s < n_constraints; ++s) out << ',' << detail::fmt_g(r.constraints[s]);
        for (std::size_t s = 0; s < n_constraints; ++s) out << ',' << detail::fmt_g(r.lambda[s]);
        out << ',' << detail::fmt_g(timing_column ? r.wall_ms : 0.0) << '\n';
    }
}

/// Mean of the last `window` values of a per-row extractor (used for the
/// trailing-window convergence reporting).
template <typename Get>
double trailing_mean(const std::vector<TraceRecord>& rows, std::size_t window, Get&& get) {
    if (rows.empty()) return 0.0;
    std::size_t n = rows.size() < window ? rows.size() : window;
    double acc = 0.0;
    for (std::size_t i = rows.size() - n; i < rows.size(); ++i) acc += get(rows[i]);
    return acc / static_cast<double>(n);
}

} // namespace fso
