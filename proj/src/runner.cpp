#include "harvestrl/runner.hpp"

#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include "harvestrl/errors.hpp"

namespace harvestrl::cli {

namespace fs = std::filesystem;
using config::format_double;

namespace {

// The output directory is left out so identical runs give identical files.
void write_header(std::ostream& out, const char* schema, const config::ExperimentConfig& cfg) {
  out << schema << '\n';
  std::istringstream text(config::serialize(cfg));
  std::string line;
  while (std::getline(text, line))
    if (!line.empty() && !line.starts_with("dir = ")) out << "# " << line << '\n';
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string learning_epochs(const harness::RunSummary& s) {
  return s.learning_time_epochs ? std::to_string(*s.learning_time_epochs) : std::string("not_converged");
}

std::string learning_days(const harness::RunSummary& s) {
  const auto d = s.learning_time_days();
  return d ? format_double(*d) : std::string("not_converged");
}

std::string hex(std::uint64_t v) {
  std::ostringstream o;
  o << std::hex << v;
  std::string h = o.str();
  return std::string(16 - h.size(), '0') + h;
}

void write_file(const fs::path& path, const std::string& body, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  written.push_back(path);
  out << body;
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

fs::path resolve_out_dir(const config::ExperimentConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("HARVESTRL_OUT"); env != nullptr && *env != '\0') return env;
  return "harvestrl_out";
}

void write_trace_csv(std::ostream& out, std::span<const scenarios::TimeSeriesRecord> records,
                     const config::ExperimentConfig& cfg) {
  write_header(out, kTraceSchema, cfg);
  out << kTraceColumns << '\n';
  for (const auto& r : records) {
    out << format_double(r.t_min) << ',' << r.state.index << ',' << r.action.index << ','
        << format_double(r.reward) << ',' << format_double(r.soc) << ',' << format_double(r.harvest_w) << ','
        << format_double(r.load_ma) << ',' << format_double(r.epsilon) << ',' << format_double(r.alpha)
        << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const harness::RunSummary> runs,
                       const config::ExperimentConfig& cfg) {
  write_header(out, kSummarySchema, cfg);
  out << kSummaryColumns << '\n';
  for (const auto& s : runs) {
    out << s.reward << ',' << s.seed << ',' << hex(s.fingerprint) << ',' << format_double(s.final_soc) << ','
        << format_double(s.min_soc) << ',' << format_double(s.survived_days) << ',' << learning_epochs(s)
        << ',' << learning_days(s) << ',' << opt(s.normalized_consumption[0]) << ','
        << opt(s.normalized_consumption[1]) << ',' << opt(s.normalized_consumption[2]) << '\n';
  }
}

void write_compare_csv(std::ostream& out, std::span<const harness::ComparisonRow> rows,
                       const config::ExperimentConfig& cfg) {
  write_header(out, kCompareSchema, cfg);
  out << kCompareColumns << '\n';
  for (const auto& row : rows) {
    const auto& m = row.median;
    out << row.reward << ',' << row.runs.size() << ',' << format_double(m.final_soc) << ','
        << format_double(m.min_soc) << ',' << format_double(m.survived_days) << ',' << learning_epochs(m)
        << ',' << learning_days(m) << ',' << opt(m.normalized_consumption[0]) << ','
        << opt(m.normalized_consumption[1]) << ',' << opt(m.normalized_consumption[2]) << ','
        << (row.ordering ? "true" : "false") << ',' << (row.survival ? "true" : "false") << '\n';
  }
}

int run(const config::ExperimentConfig& cfg, std::ostream& log, bool quiet) {
  std::vector<fs::path> written;
  auto cleanup = [&written] {
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  };
  try {
    cfg.validate();
    const fs::path dir = resolve_out_dir(cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");

    std::vector<std::uint64_t> seeds(cfg.sweep);
    std::iota(seeds.begin(), seeds.end(), cfg.seed);

    const auto primary = cfg.scenario_config(0);
    const auto trace_run = scenarios::run_scenario(primary, cfg.seed);

    std::vector<harness::RunSummary> summaries;
    std::vector<harness::ComparisonRow> rows;
    if (cfg.rewards.size() > 1) {
      rows = harness::compare_rewards(primary, cfg.rewards, seeds);
      for (const auto& row : rows) summaries.insert(summaries.end(), row.runs.begin(), row.runs.end());
    } else {
      summaries = harness::sweep_seeds(primary, seeds);
    }

    write_file(dir / "effective_config.ini", config::serialize(cfg), written);
    std::ostringstream trace;
    write_trace_csv(trace, trace_run.records, cfg);
    write_file(dir / "trace.csv", trace.str(), written);
    std::ostringstream summary;
    write_summary_csv(summary, summaries, cfg);
    write_file(dir / "summary.csv", summary.str(), written);
    if (!rows.empty()) {
      std::ostringstream compare;
      write_compare_csv(compare, rows, cfg);
      write_file(dir / "compare.csv", compare.str(), written);
    }

    if (!quiet) {
      log << "wrote " << trace_run.records.size() << " epochs, " << summaries.size() << " run summaries to "
          << dir.string() << '\n';
      for (const auto& row : rows)
        log << row.reward << ": ordering=" << (row.ordering ? "yes" : "no")
            << " survival=" << (row.survival ? "yes" : "no") << " final_soc=" << format_double(row.median.final_soc)
            << '\n';
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    cleanup();
    log << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const IoError& e) {
    cleanup();
    log << "i/o error: " << e.what() << '\n';
    return kExitIoError;
  } catch (const std::exception& e) {
    cleanup();
    log << "runtime error: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace harvestrl::cli
