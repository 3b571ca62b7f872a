#include "rssiloc/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <fstream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <tuple>

namespace rssiloc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }
bool same_vec(const Vec3& a, const Vec3& b) {
    return same_double(a.x, b.x) && same_double(a.y, b.y) && same_double(a.z, b.z);
}

std::string fmt_double(double v) { return std::isnan(v) ? std::string("nan") : fmt::format("{:.9g}", v); }

std::string json_double(double v) { return std::isfinite(v) ? fmt_double(v) : std::string("null"); }

double parse_double(std::string_view text) {
    if (text == "nan" || text == "-nan" || text.empty()) {
        return kNaN;
    }
    // strtod accepts the full printf %g output, including exponents.
    const std::string owned(text);
    char* end = nullptr;
    const double v = std::strtod(owned.c_str(), &end);
    if (end != owned.c_str() + owned.size()) {
        throw Error(ErrorCode::IoFailure, fmt::format("malformed number '{}'", text));
    }
    return v;
}

template <typename Int>
Int parse_int(std::string_view text) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::IoFailure, fmt::format("malformed integer '{}'", text));
    }
    return v;
}

double quantize_value(double v) { return parse_double(fmt_double(v)); }

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

bool operator==(const ResultRow& l, const ResultRow& r) {
    return l.scenario == r.scenario && same_double(l.sweep_value, r.sweep_value) && l.robot_id == r.robot_id &&
           l.repetition == r.repetition && same_vec(l.truth, r.truth) && same_vec(l.estimate, r.estimate) &&
           same_double(l.error_m, r.error_m) && l.flags == r.flags;
}

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

OutputFormat output_format_from_string(std::string_view text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    throw Error(ErrorCode::InvalidConfig, fmt::format("unknown output format '{}'", text));
}

std::string flags_of(const LocalizationRecord& rec) {
    std::vector<std::string> tokens;
    if (rec.z_clamped) tokens.emplace_back("z_clamped");
    if (rec.strength_clamped) tokens.emplace_back("strength_clamped");
    if (rec.ill_conditioned) tokens.emplace_back("ill_conditioned");
    if (rec.failure) tokens.push_back(fmt::format("failed={}", to_string(*rec.failure)));
    return fmt::format("{}", fmt::join(tokens, "|"));
}

ResultRow to_row(const LocalizationRecord& rec, std::string_view scenario, double sweep_value) {
    ResultRow row;
    row.scenario = std::string(scenario);
    row.sweep_value = sweep_value;
    row.robot_id = rec.robot;
    row.repetition = rec.step;
    row.truth = rec.truth;
    row.estimate = rec.estimate.value_or(Vec3{kNaN, kNaN, kNaN});
    row.error_m = rec.error;
    row.flags = flags_of(rec);
    return row;
}

void sort_rows(ResultTable& table) {
    std::stable_sort(table.begin(), table.end(), [](const ResultRow& a, const ResultRow& b) {
        return std::tie(a.scenario, a.sweep_value, a.robot_id, a.repetition) <
               std::tie(b.scenario, b.sweep_value, b.robot_id, b.repetition);
    });
}

ResultTable quantize(const ResultTable& table) {
    ResultTable out = table;
    for (auto& row : out) {
        row.sweep_value = quantize_value(row.sweep_value);
        for (Vec3* v : {&row.truth, &row.estimate}) {
            *v = {quantize_value(v->x), quantize_value(v->y), quantize_value(v->z)};
        }
        row.error_m = quantize_value(row.error_m);
    }
    return out;
}

std::string format_results(const ResultTable& table, OutputFormat format) {
    if (table.empty()) {
        throw Error(ErrorCode::IoFailure, "refusing to write an empty result table");
    }
    std::string out;
    if (format == OutputFormat::Csv) {
        out.append(kCsvHeader).push_back('\n');
        for (const auto& r : table) {
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario, fmt_double(r.sweep_value),
                               r.robot_id, r.repetition, fmt_double(r.truth.x), fmt_double(r.truth.y),
                               fmt_double(r.truth.z), fmt_double(r.estimate.x), fmt_double(r.estimate.y),
                               fmt_double(r.estimate.z), fmt_double(r.error_m), r.flags);
        }
        return out;
    }
    // Hand-written so that floats keep the same 9 significant digits as the CSV.
    out += "[\n";
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& r = table[i];
        out += fmt::format(
            "  {{\"scenario\": {}, \"sweep_value\": {}, \"robot_id\": {}, \"repetition\": {}, \"true_x\": {}, "
            "\"true_y\": {}, \"true_z\": {}, \"est_x\": {}, \"est_y\": {}, \"est_z\": {}, \"error_m\": {}, "
            "\"flags\": {}}}{}\n",
            nlohmann::json(r.scenario).dump(), json_double(r.sweep_value), r.robot_id, r.repetition,
            json_double(r.truth.x), json_double(r.truth.y), json_double(r.truth.z), json_double(r.estimate.x),
            json_double(r.estimate.y), json_double(r.estimate.z), json_double(r.error_m),
            nlohmann::json(r.flags).dump(), i + 1 < table.size() ? "," : "");
    }
    out += "]\n";
    return out;
}

ResultTable parse_results(std::string_view text, OutputFormat format) {
    ResultTable table;
    if (format == OutputFormat::Csv) {
        std::vector<std::string_view> lines = split(text, '\n');
        if (lines.empty() || lines.front() != kCsvHeader) {
            throw Error(ErrorCode::IoFailure, "CSV header does not match the result schema");
        }
        for (std::size_t i = 1; i < lines.size(); ++i) {
            if (lines[i].empty()) {
                continue;
            }
            const auto f = split(lines[i], ',');
            if (f.size() != 12) {
                throw Error(ErrorCode::IoFailure, fmt::format("CSV line {} has {} fields", i + 1, f.size()));
            }
            ResultRow r;
            r.scenario = std::string(f[0]);
            r.sweep_value = parse_double(f[1]);
            r.robot_id = parse_int<SourceId>(f[2]);
            r.repetition = parse_int<std::uint64_t>(f[3]);
            r.truth = {parse_double(f[4]), parse_double(f[5]), parse_double(f[6])};
            r.estimate = {parse_double(f[7]), parse_double(f[8]), parse_double(f[9])};
            r.error_m = parse_double(f[10]);
            r.flags = std::string(f[11]);
            table.push_back(std::move(r));
        }
        return table;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoFailure, e.what());
    }
    if (!doc.is_array()) {
        throw Error(ErrorCode::IoFailure, "JSON results must be an array");
    }
    auto num = [](const nlohmann::json& v) { return v.is_null() ? kNaN : v.get<double>(); };
    try {
        for (const auto& o : doc) {
            ResultRow r;
            r.scenario = o.at("scenario").get<std::string>();
            r.sweep_value = num(o.at("sweep_value"));
            r.robot_id = o.at("robot_id").get<SourceId>();
            r.repetition = o.at("repetition").get<std::uint64_t>();
            r.truth = {num(o.at("true_x")), num(o.at("true_y")), num(o.at("true_z"))};
            r.estimate = {num(o.at("est_x")), num(o.at("est_y")), num(o.at("est_z"))};
            r.error_m = num(o.at("error_m"));
            r.flags = o.at("flags").get<std::string>();
            table.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::IoFailure, e.what());
    }
    return table;
}

void write_results(const ResultTable& table, OutputFormat format, const std::filesystem::path& path) {
    const std::string text = format_results(table, format);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoFailure, fmt::format("cannot open '{}' for writing", path.string()));
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw Error(ErrorCode::IoFailure, fmt::format("failed writing '{}'", path.string()));
    }
}

ResultTable read_results(const std::filesystem::path& path, OutputFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, fmt::format("cannot open '{}'", path.string()));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_results(buffer.str(), format);
}

std::vector<SummaryRow> summarize(const ResultTable& table) {
    std::map<std::pair<double, SourceId>, std::pair<std::vector<double>, std::size_t>> groups;
    for (const auto& r : quantize(table)) {
        auto& [errors, failed] = groups[{r.sweep_value, r.robot_id}];
        if (std::isnan(r.error_m)) {
            ++failed;
        } else {
            errors.push_back(r.error_m);
        }
    }
    std::vector<SummaryRow> out;
    for (auto& [key, group] : groups) {
        auto& [errors, failed] = group;
        SummaryRow s;
        s.sweep_value = key.first;
        s.robot_id = key.second;
        s.count = errors.size();
        s.failed = failed;
        s.mean = s.median = s.stddev = kNaN;
        if (!errors.empty()) {
            double sum = 0.0;
            for (double e : errors) sum += e;
            s.mean = sum / static_cast<double>(errors.size());
            std::sort(errors.begin(), errors.end());
            const std::size_t n = errors.size();
            s.median = n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
            if (n > 1) {
                double ss = 0.0;
                for (double e : errors) ss += (e - s.mean) * (e - s.mean);
                s.stddev = std::sqrt(ss / static_cast<double>(n - 1));
            } else {
                s.stddev = 0.0;
            }
        }
        out.push_back(s);
    }
    return out;
}

std::string format_summary(const std::vector<SummaryRow>& summary) {
    std::string out = "sweep_value,robot_id,count,failed,mean_error_m,median_error_m,std_error_m\n";
    for (const auto& s : summary) {
        out += fmt::format("{:.9g},{},{},{},{:.12g},{:.12g},{:.12g}\n", s.sweep_value, s.robot_id, s.count, s.failed,
                           s.mean, s.median, s.stddev);
    }
    return out;
}

double mean_error(const ResultTable& table) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : table) {
        if (!std::isnan(r.error_m)) {
            sum += r.error_m;
            ++n;
        }
    }
    return n == 0 ? kNaN : sum / static_cast<double>(n);
}

}  // namespace rssiloc
