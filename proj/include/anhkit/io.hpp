#pragma once

// File formats. Floating-point values are written with 17 significant
// digits so every CSV round-trips exactly.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anhkit/bench.hpp"
#include "anhkit/criteria.hpp"
#include "anhkit/pipeline.hpp"
#include "anhkit/ridge.hpp"
#include "anhkit/signal.hpp"
#include "anhkit/tf_analysis.hpp"

namespace anh::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

/// Reads `t,value` (fs taken from the first time step unless given) or a
/// single value column, with or without a header. Throws std::runtime_error
/// on unreadable or empty input and when fs cannot be determined.
Signal read_signal_csv(const fs::path& path, std::optional<double> fs_hz = std::nullopt);
void write_signal_csv(const fs::path& path, const Signal& x);
void write_series_csv(const fs::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns);

/// Reads one sampled period, one value per line (header optional).
std::vector<double> read_period_csv(const fs::path& path);

Json to_json(const WaveShape& ws);
WaveShape wave_shape_from_json(const Json& j);
WaveShape read_wave_shape_json(const fs::path& path);
/// {r, alpha, beta, rank_deficient}.
Json to_json(const CoefficientVector& c);

void write_ridge_csv(const fs::path& path, const Ridge& ridge);
/// `r,value,nuisance`; nuisance is empty for G and R.
void write_curve_csv(const fs::path& path, const CriterionCurve& curve);
/// `r1,r2,value`.
void write_surface_csv(const fs::path& path, const CriterionSurface& surface);

/// Magnitude matrix (rows = frames, columns = stored bins) plus
/// `<stem>.json` with the time and frequency axes.
void write_spectrogram(const fs::path& csv_path, const TFR& tfr);

/// `condition,criterion,seed,r_star,snr_out`.
void write_bench_csv(const fs::path& path, const BenchReport& report);
/// Parameters plus per-(condition, method) medians.
Json bench_summary(const BenchReport& report);

/// Every PipelineConfig field under its own name; ridge parameters are
/// flattened to lambda, mu and max_jump, criteria to a code string.
Json to_json(const PipelineConfig& cfg);
/// Overwrites the fields present in `j`. Unknown keys and mistyped values
/// throw std::invalid_argument.
void apply_json(const Json& j, PipelineConfig& cfg);

void write_json(const fs::path& path, const Json& j);
Json read_json(const fs::path& path);

/// Number formatting used by every writer.
std::string format_double(double v);

}  // namespace anh::io
