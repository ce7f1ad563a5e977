#include "ltr/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <istream>
#include <iterator>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "ltr/errors.hpp"
#include "ltr/ntd.hpp"
#include "ltr/tensor_io.hpp"
#include "ltr/verify.hpp"

namespace ltr {

namespace {

using Clock = std::chrono::steady_clock;

struct Job {
  std::size_t method;
  std::size_t rank;
  std::size_t trial;
};

BenchRecord run_job(const BenchConfig& cfg, const Job& job) {
  BenchRecord rec;
  rec.method = cfg.methods[job.method];
  rec.shape = cfg.input ? cfg.input->shape() : cfg.shape;
  rec.rank = cfg.ranks[job.rank];
  rec.trial = job.trial;
  rec.seed = trial_seed(cfg.seed, job.trial);

  // Same tensor for every method and rank within a trial.
  const DenseTensor t = cfg.input ? *cfg.input : uniform_random(rec.shape, rec.seed);
  rec.rank.validate(t.shape());

  DenseTensor out;
  const auto start = Clock::now();
  if (rec.method == "ltr") {
    out = reduce(t, rec.rank, rec.seed).tensor;
  } else {
    NtdOptions opts;
    opts.objective =
        rec.method == "ntd_ls" ? NtdObjective::LeastSquares : NtdObjective::KullbackLeibler;
    opts.max_iters = cfg.ntd_iters;
    opts.seed = rec.seed;
    out = tucker_reconstruct(ntd_fit(t, rec.rank, opts).model);
  }
  rec.runtime_s = std::chrono::duration<double>(Clock::now() - start).count();
  rec.kl_err = kl_divergence(t, out);
  rec.ls_err = ls_error(t, out);
  return rec;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

std::vector<std::size_t> parse_dims(const std::string& s) {
  std::vector<std::size_t> dims;
  for (const auto& p : split(s, 'x')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(p, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (p.empty() || pos != p.size()) throw ParseError("bench csv: bad dimension list '" + s + "'");
    dims.push_back(static_cast<std::size_t>(v));
  }
  return dims;
}

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(trial) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("LTR_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<BenchRecord> run_bench(const BenchConfig& config) {
  if (config.methods.empty()) throw std::invalid_argument("bench: no methods");
  for (const auto& m : config.methods) {
    if (m != "ltr" && m != "ntd_ls" && m != "ntd_kl") {
      throw std::invalid_argument("bench: unknown method '" + m + "'");
    }
  }
  if (config.ranks.empty()) throw std::invalid_argument("bench: no target ranks");
  if (config.trials == 0) throw std::invalid_argument("bench: trials must be >= 1");
  const Shape& shape = config.input ? config.input->shape() : config.shape;
  for (const auto& r : config.ranks) r.validate(shape);

  std::vector<Job> jobs;
  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    for (std::size_t r = 0; r < config.ranks.size(); ++r) {
      for (std::size_t t = 0; t < config.trials; ++t) jobs.push_back({m, r, t});
    }
  }

  std::vector<BenchRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        records[j] = run_job(config, jobs[j]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const unsigned n_threads = std::min<std::size_t>(
      config.threads ? config.threads : default_thread_count(), jobs.size());
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRecord>& records) {
  out << kBenchCsvHeader << '\n';
  for (const auto& r : records) {
    out << r.method << ',' << r.shape.to_string('x') << ',' << r.rank.to_string('x') << ','
        << r.trial << ',' << r.seed << ',' << format_double(r.runtime_s) << ','
        << format_double(r.kl_err) << ',' << format_double(r.ls_err) << '\n';
  }
}

std::vector<BenchRecord> read_bench_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kBenchCsvHeader) {
    throw ParseError("bench csv: missing or unexpected header");
  }
  std::vector<BenchRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 8) {
      throw ParseError("bench csv line " + std::to_string(lineno) + ": expected 8 fields");
    }
    BenchRecord r;
    try {
      r.method = f[0];
      r.shape = Shape(parse_dims(f[1]));
      r.rank.ranks = parse_dims(f[2]);
      r.trial = static_cast<std::size_t>(std::stoull(f[3]));
      r.seed = std::stoull(f[4]);
      r.runtime_s = parse_double(f[5]);
      r.kl_err = parse_double(f[6]);
      r.ls_err = parse_double(f[7]);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError("bench csv line " + std::to_string(lineno) + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<BenchSummary> summarize(const std::vector<BenchRecord>& records) {
  struct Acc {
    std::string method;
    TuckerRank rank;
    std::vector<double> runtime, kl, ls;
  };
  std::vector<Acc> groups;
  for (const auto& r : records) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& a) {
      return a.method == r.method && a.rank == r.rank;
    });
    if (it == groups.end()) {
      groups.push_back({r.method, r.rank, {}, {}, {}});
      it = std::prev(groups.end());
    }
    it->runtime.push_back(r.runtime_s);
    it->kl.push_back(r.kl_err);
    it->ls.push_back(r.ls_err);
  }
  std::vector<BenchSummary> out;
  for (const auto& g : groups) {
    BenchSummary s;
    s.method = g.method;
    s.rank = g.rank;
    s.n = g.runtime.size();
    std::tie(s.runtime_mean, s.runtime_se) = mean_se(g.runtime);
    std::tie(s.kl_mean, s.kl_se) = mean_se(g.kl);
    std::tie(s.ls_mean, s.ls_se) = mean_se(g.ls);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ltr
