#pragma once

// Seeded benchmark runs comparing LTR with the NTD baselines.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ltr/reduce.hpp"
#include "ltr/tensor.hpp"

namespace ltr {

struct BenchRecord {
  std::string method;
  Shape shape;
  TuckerRank rank;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  double runtime_s = 0.0;
  double kl_err = 0.0;
  double ls_err = 0.0;
};

struct BenchConfig {
  std::vector<std::string> methods{"ltr"};  // ltr, ntd_ls, ntd_kl
  Shape shape{30, 30, 30};
  std::vector<TuckerRank> ranks;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  int ntd_iters = 200;
  // When set, every trial uses this tensor instead of a fresh uniform one.
  std::optional<DenseTensor> input;
  // 0 means: LTR_THREADS if set, otherwise hardware concurrency.
  unsigned threads = 0;
};

/// Per-trial seed, a splitmix64 step over (base, trial).
std::uint64_t trial_seed(std::uint64_t base, std::size_t trial);

/// Throws std::invalid_argument on an unknown method or an empty rank list.
/// Records come back ordered by method, then rank, then trial, whatever the
/// thread count.
std::vector<BenchRecord> run_bench(const BenchConfig& config);

inline constexpr const char* kBenchCsvHeader =
    "method,shape,rank,trial,seed,runtime_s,kl_err,ls_err";

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records);
/// Throws ParseError on a malformed row or header.
std::vector<BenchRecord> read_bench_csv(std::istream& in);

struct BenchSummary {
  std::string method;
  TuckerRank rank;
  std::size_t n = 0;
  double runtime_mean = 0.0, runtime_se = 0.0;
  double kl_mean = 0.0, kl_se = 0.0;
  double ls_mean = 0.0, ls_se = 0.0;
};

/// Mean and standard error per (method, rank), in first-seen order.
std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records);

/// Worker count: LTR_THREADS when it parses as a positive integer, else the
/// hardware concurrency (at least 1).
unsigned default_thread_count();

}  // namespace ltr
