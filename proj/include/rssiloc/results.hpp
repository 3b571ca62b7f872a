#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rssiloc/world.hpp"

namespace rssiloc {

struct ResultRow {
    std::string scenario;
    double sweep_value = 0.0;
    SourceId robot_id = 0;
    std::uint64_t repetition = 0;
    Vec3 truth;
    Vec3 estimate;  ///< NaN components when the step failed
    double error_m = 0.0;
    std::string flags;  ///< '|'-joined tokens, empty when clean

    friend bool operator==(const ResultRow&, const ResultRow&);
};

using ResultTable = std::vector<ResultRow>;

enum class OutputFormat { Csv, Json };

std::string_view to_string(OutputFormat f);
OutputFormat output_format_from_string(std::string_view text);

inline constexpr std::string_view kCsvHeader =
    "scenario,sweep_value,robot_id,repetition,true_x,true_y,true_z,est_x,est_y,est_z,error_m,flags";

ResultRow to_row(const LocalizationRecord& rec, std::string_view scenario, double sweep_value);
std::string flags_of(const LocalizationRecord& rec);

/// Orders rows by (scenario, sweep value, robot, repetition).
void sort_rows(ResultTable& table);

/// Rounds every floating field to the 9 significant digits used on disk.
ResultTable quantize(const ResultTable& table);

/// Serialized text of a table. Throws Error{IoFailure} for an empty table.
std::string format_results(const ResultTable& table, OutputFormat format);
ResultTable parse_results(std::string_view text, OutputFormat format);

void write_results(const ResultTable& table, OutputFormat format, const std::filesystem::path& path);
ResultTable read_results(const std::filesystem::path& path, OutputFormat format);

struct SummaryRow {
    double sweep_value = 0.0;
    SourceId robot_id = 0;
    std::size_t count = 0;   ///< successful steps
    std::size_t failed = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;     ///< sample standard deviation (n - 1)
};

/// Error statistics per (sweep value, robot), computed from the quantized rows
/// so they can be reproduced exactly from the written file.
std::vector<SummaryRow> summarize(const ResultTable& table);
std::string format_summary(const std::vector<SummaryRow>& summary);

/// Mean error over successful rows.
double mean_error(const ResultTable& table);

}  // namespace rssiloc
