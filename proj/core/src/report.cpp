#include "featlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "featlab/error.hpp"

namespace featlab {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string json_number(double v) {
    return std::isfinite(v) ? format_number(v) : "null";
}

std::string seed_text(const ReportRow& r) {
    return r.seed ? std::to_string(*r.seed) : "ALL";
}

double nan_if(bool diverged, double v) {
    return diverged ? std::nan("") : v;
}

}  // namespace

std::string render_csv(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << kReportColumns << '\n';
    for (const auto& r : rows) {
        os << r.scenario << ',' << seed_text(r) << ',' << r.kappa << ','
           << format_number(nan_if(r.diverged, r.train_loss)) << ','
           << format_number(nan_if(r.diverged, r.feature_sim_mean)) << ','
           << format_number(nan_if(r.diverged, r.feature_sim_std)) << ','
           << format_number(nan_if(r.diverged, r.success_rate_mean)) << ','
           << format_number(nan_if(r.diverged, r.success_rate_std)) << ','
           << format_number(r.runtime_s) << '\n';
    }
    return os.str();
}

std::string render_json(const std::vector<ReportRow>& rows) {
    std::ostringstream os;
    os << "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << "  {\"scenario\": \"" << r.scenario << "\", \"seed\": \"" << seed_text(r) << "\", \"kappa\": " << r.kappa
           << ", \"train_loss\": " << json_number(nan_if(r.diverged, r.train_loss))
           << ", \"feature_sim_mean\": " << json_number(nan_if(r.diverged, r.feature_sim_mean))
           << ", \"feature_sim_std\": " << json_number(nan_if(r.diverged, r.feature_sim_std))
           << ", \"success_rate_mean\": " << json_number(nan_if(r.diverged, r.success_rate_mean))
           << ", \"success_rate_std\": " << json_number(nan_if(r.diverged, r.success_rate_std))
           << ", \"runtime_s\": " << json_number(r.runtime_s) << '}' << (i + 1 < rows.size() ? "," : "") << '\n';
    }
    os << "]\n";
    return os.str();
}

std::string render(const std::vector<ReportRow>& rows, ReportFormat format) {
    return format == ReportFormat::csv ? render_csv(rows) : render_json(rows);
}

std::vector<ReportRow> parse_json_report(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    std::vector<ReportRow> rows;
    auto number = [](const nlohmann::json& v) { return v.is_null() ? std::nan("") : v.get<double>(); };
    for (const auto& item : j) {
        ReportRow r;
        r.scenario = item.at("scenario").get<std::string>();
        const auto seed = item.at("seed").get<std::string>();
        if (seed != "ALL") r.seed = std::stoull(seed);
        r.kappa = item.at("kappa").get<std::size_t>();
        r.train_loss = number(item.at("train_loss"));
        r.diverged = std::isnan(r.train_loss);
        r.feature_sim_mean = number(item.at("feature_sim_mean"));
        r.feature_sim_std = number(item.at("feature_sim_std"));
        r.success_rate_mean = number(item.at("success_rate_mean"));
        r.success_rate_std = number(item.at("success_rate_std"));
        r.runtime_s = number(item.at("runtime_s"));
        rows.push_back(r);
    }
    return rows;
}

std::string render_curve(const std::vector<CurveRow>& rows, ReportFormat format) {
    std::ostringstream os;
    if (format == ReportFormat::csv) {
        os << "depth,sim_mean,sim_std\n";
        for (const auto& r : rows) os << r.depth << ',' << format_number(r.sim_mean) << ',' << format_number(r.sim_std) << '\n';
    } else {
        os << "[\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            os << "  {\"depth\": " << rows[i].depth << ", \"sim_mean\": " << json_number(rows[i].sim_mean)
               << ", \"sim_std\": " << json_number(rows[i].sim_std) << '}' << (i + 1 < rows.size() ? "," : "") << '\n';
        os << "]\n";
    }
    return os.str();
}

std::string render_gradcheck(const std::vector<GradReport>& reports, ReportFormat format) {
    std::ostringstream os;
    auto coord = [](const GradReport& r) {
        std::string s;
        for (std::size_t i = 0; i < r.worst_coordinate.size(); ++i)
            s += (i ? ":" : "") + std::to_string(r.worst_coordinate[i]);
        return s;
    };
    if (format == ReportFormat::csv) {
        os << "group,dim,m,seed,h,max_rel_error,worst_coordinate,small_denominator\n";
        for (const auto& r : reports)
            os << group_name(r.group) << ',' << r.dim << ',' << r.m << ',' << r.seed << ',' << format_number(r.h) << ','
               << format_number(r.max_rel_error) << ',' << coord(r) << ',' << (r.small_denominator ? 1 : 0) << '\n';
    } else {
        os << "[\n";
        for (std::size_t i = 0; i < reports.size(); ++i) {
            const auto& r = reports[i];
            os << "  {\"group\": \"" << group_name(r.group) << "\", \"dim\": " << r.dim << ", \"m\": " << r.m
               << ", \"seed\": " << r.seed << ", \"h\": " << json_number(r.h)
               << ", \"max_rel_error\": " << json_number(r.max_rel_error) << ", \"worst_coordinate\": \"" << coord(r)
               << "\", \"small_denominator\": " << (r.small_denominator ? "true" : "false") << '}'
               << (i + 1 < reports.size() ? "," : "") << '\n';
        }
        os << "]\n";
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

void emit_report(const std::vector<ReportRow>& rows, ReportFormat format, const std::string& path) {
    if (rows.empty()) throw EmptySetError("emit_report: no rows");
    write_text(path, render(rows, format));
}

std::string sibling_path(const std::string& path, const std::string& suffix) {
    std::filesystem::path p(path);
    p.replace_extension();
    return p.string() + suffix;
}

}  // namespace featlab
