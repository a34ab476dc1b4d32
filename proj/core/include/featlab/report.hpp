#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "featlab/config.hpp"
#include "featlab/gradcheck.hpp"

namespace featlab {

/// One line of an experiment table. `seed` is empty for the aggregate row.
struct ReportRow {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::size_t kappa = 0;
    double train_loss = 0.0;
    double feature_sim_mean = 0.0;
    double feature_sim_std = 0.0;
    double success_rate_mean = 0.0;
    double success_rate_std = 0.0;
    double runtime_s = 0.0;
    bool diverged = false;  ///< numeric columns are NaN (CSV) / null (JSON)

    bool operator==(const ReportRow&) const = default;
};

/// Point of the deep-linear similarity-vs-depth curve.
struct CurveRow {
    std::size_t depth = 0;
    double sim_mean = 0.0;
    double sim_std = 0.0;
};

inline constexpr const char* kReportColumns =
    "scenario,seed,kappa,train_loss,feature_sim_mean,feature_sim_std,success_rate_mean,success_rate_std,runtime_s";

/// 17-significant-digit rendering; NaN renders as "nan".
std::string format_number(double v);

std::string render_csv(const std::vector<ReportRow>& rows);
std::string render_json(const std::vector<ReportRow>& rows);
std::string render(const std::vector<ReportRow>& rows, ReportFormat format);

/// Inverse of render_json.
std::vector<ReportRow> parse_json_report(const std::string& text);

std::string render_curve(const std::vector<CurveRow>& rows, ReportFormat format);
std::string render_gradcheck(const std::vector<GradReport>& reports, ReportFormat format);

/// Write `rows` to `path`; throws EmptySetError on no rows, IoError when the
/// file cannot be written.
void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path);

void write_text(const std::string& path, const std::string& text);

/// Sibling path with the extension replaced: ("out/run.csv", ".curve.csv") -> "out/run.curve.csv".
std::string sibling_path(const std::string& path, const std::string& suffix);

}  // namespace featlab
