#pragma once

#include <filesystem>
#include <ostream>
#include <span>
#include <string>

#include "harvestrl/config.hpp"
#include "harvestrl/harness.hpp"

namespace harvestrl::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfigError = 2,
  kExitRuntimeError = 3,
  kExitIoError = 4,
  kExitConfigParseError = 5,
};

inline constexpr const char* kTraceSchema = "# harvestrl.trace v1";
inline constexpr const char* kSummarySchema = "# harvestrl.summary v1";
inline constexpr const char* kCompareSchema = "# harvestrl.compare v1";

inline constexpr const char* kTraceColumns = "t_min,state,action,reward,soc,harvest_w,load_ma,epsilon,alpha";
inline constexpr const char* kSummaryColumns =
    "reward,seed,fingerprint,final_soc,min_soc,survived_days,learning_time_epochs,learning_time_days,"
    "norm_relax,norm_walk,norm_run";
inline constexpr const char* kCompareColumns =
    "reward,n_seeds,final_soc,min_soc,survived_days,learning_time_epochs,learning_time_days,"
    "norm_relax,norm_walk,norm_run,ordering,survival";

// --out, else the config's output.dir, else $HARVESTRL_OUT, else ./harvestrl_out.
std::filesystem::path resolve_out_dir(const config::ExperimentConfig& cfg);

void write_trace_csv(std::ostream& out, std::span<const scenarios::TimeSeriesRecord> records,
                     const config::ExperimentConfig& cfg);
void write_summary_csv(std::ostream& out, std::span<const harness::RunSummary> runs,
                       const config::ExperimentConfig& cfg);
void write_compare_csv(std::ostream& out, std::span<const harness::ComparisonRow> rows,
                       const config::ExperimentConfig& cfg);

// Runs every configured reward over the seed sweep and writes
// effective_config.ini, trace.csv, summary.csv and (for several rewards)
// compare.csv into the output directory. Files already written are removed
// on failure. Returns an ExitCode.
int run(const config::ExperimentConfig& cfg, std::ostream& log, bool quiet = false);

}  // namespace harvestrl::cli
