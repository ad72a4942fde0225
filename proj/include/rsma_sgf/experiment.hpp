// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rsma_sgf/analytic.hpp"
#include "rsma_sgf/protocol.hpp"
#include "rsma_sgf/quadrature.hpp"
#include "rsma_sgf/simulator.hpp"

namespace rsma_sgf {

/// Malformed or invalid experiment spec. The message names the key and, when
/// known, the line it came from.
class SpecError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

enum class PowerRule { Equal, FixedRatio, FixedPB };

/// Row-producing methods. `mc` is the GF outage estimate; `mc_gb`, `ergodic_gf`
/// and `ergodic_sum` come from the same simulated blocks.
enum class RunMethod {
    Mc,
    McGb,
    ErgodicGf,
    ErgodicSum,
    Theorem1,
    Corollary1,
    Theorem2,
    Corollary2,
    Corollary3,
    Quadrature,
};

std::string_view to_string(RunMethod method);
std::string_view to_string(PowerRule rule);

struct ExperimentSpec
{
    std::string name = "experiment";
    std::vector<SchemeKind> schemes{SchemeKind::RsmaSgf};
    std::vector<int> k_list;
    /// P_B in dB, except under FixedPB where it is P_F in dB.
    std::vector<double> snr_db;
    PowerRule power_rule = PowerRule::Equal;
    double ratio = 1.0;          ///< P_F / P_B under FixedRatio
    double p_b_fixed_db = 10.0;  ///< P_B under FixedPB
    /// Empty means "same": R_B follows each R_F.
    std::optional<double> rate_b;
    std::vector<double> rate_f;
    std::vector<RunMethod> methods;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "csv";

    Precision precision = Precision::Auto;
    QuadratureSpec quadrature;
    SimulationOptions simulation;

    void validate() const;
};

/// Parses `key = value` text; `origin` prefixes error messages. Each override
/// is a `key=value` string applied after the text, replacing the key.
ExperimentSpec parse_spec_text(std::string_view text, std::string_view origin = "<spec>",
                               const std::vector<std::string>& overrides = {});

ExperimentSpec parse_spec(const std::string& path, const std::vector<std::string>& overrides = {});

/// Figure families "2a" .. "7". Each bundle is a list of spec texts whose
/// rows are concatenated; an unknown id throws SpecError.
std::vector<std::string> figure_ids();
std::vector<std::string> figure_spec_texts(std::string_view id);

struct ResultRow
{
    int k = 0;
    double p_b_db = 0.0;
    double p_f_db = 0.0;
    double rate_b = 0.0;
    double rate_f = 0.0;
    SchemeKind scheme = SchemeKind::RsmaSgf;
    std::string method;
    std::optional<double> value;
    /// CI half-width for Monte Carlo rows, error estimate for quadrature.
    std::optional<double> ci;
    std::optional<double> condition_flag;
    std::string error;
    double wall_time_ms = 0.0;
};

/// Grid order: k, snr, rate_f, scheme, method. Per-row failures land in `error`.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

inline const char* kCsvHeader = "k,p_b_db,p_f_db,rate_b,rate_f,scheme,method,value,ci,condition_flag,error";

/// CSV without the timing column; byte-identical for identical inputs.
std::string format_csv(const std::vector<ResultRow>& rows);
/// JSON array of row objects, wall_time_ms included.
std::string format_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_json_rows(std::string_view text);

/// Writes `rows` as "csv" or "json"; an empty path writes to stdout.
void emit(const std::vector<ResultRow>& rows, std::string_view format, const std::string& path);

} // namespace rsma_sgf
