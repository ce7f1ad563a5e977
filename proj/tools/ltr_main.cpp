// ltr: command-line front end for rank reduction, coordinates, verification
// and benchmarks.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltr/bench.hpp"
#include "ltr/errors.hpp"
#include "ltr/infogeo.hpp"
#include "ltr/rank1.hpp"
#include "ltr/reduce.hpp"
#include "ltr/tensor.hpp"
#include "ltr/tensor_io.hpp"
#include "ltr/verify.hpp"

namespace {

using nlohmann::json;

constexpr int kExitMalformed = 2;
constexpr int kExitRank = 3;
constexpr int kExitCertify = 4;
constexpr int kExitVerify = 5;

std::vector<std::size_t> parse_sizes(const std::string& text, const std::string& seps,
                                     const char* what) {
  std::vector<std::size_t> out;
  std::string cur;
  auto flush = [&] {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(cur, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (cur.empty() || pos != cur.size() || cur.front() == '-') {
      throw ltr::ParseError(std::string(what) + ": bad entry '" + cur + "' in '" + text + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
    cur.clear();
  };
  for (char c : text) {
    if (seps.find(c) != std::string::npos) {
      flush();
    } else if (c != ' ') {
      cur += c;
    }
  }
  flush();
  return out;
}

ltr::TuckerRank parse_rank(const std::string& text) {
  try {
    return {parse_sizes(text, ",x", "rank")};
  } catch (const ltr::ParseError& e) {
    throw ltr::RankError(e.what());
  }
}

// Each comma-separated entry is either one rank applied to every mode or an
// 'x'-joined tuple.
std::vector<ltr::TuckerRank> parse_rank_list(const std::string& text, std::size_t order) {
  std::vector<ltr::TuckerRank> out;
  std::stringstream in(text);
  std::string entry;
  while (std::getline(in, entry, ',')) {
    ltr::TuckerRank r = parse_rank(entry);
    if (r.ranks.size() == 1) r.ranks.assign(order, r.ranks.front());
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ltr::RankError("empty rank list");
  return out;
}

ltr::BingoSpec load_spec(const std::string& arg) {
  if (!arg.empty() && arg.front() == '{') return ltr::bingo_spec_from_json(arg);
  std::ifstream in(arg);
  if (!in) throw ltr::ParseError("cannot open spec file '" + arg + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ltr::bingo_spec_from_json(buf.str());
}

json certificate_json(const ltr::ProjectionCertificate& c, const ltr::CertificateTolerances& tol) {
  return {
      {"max_theta_on_omega", c.max_theta_on_omega},
      {"max_eta_drift_off_omega", c.max_eta_drift_off_omega},
      {"max_axis_sum_drift", c.max_axis_sum_drift},
      {"omega_size", c.omega_size},
      {"tolerances", {{"theta", tol.theta}, {"eta", tol.eta}, {"axis_sum", tol.axis_sum}}},
      {"checks",
       {{"theta_zero_on_omega", c.theta_pass},
        {"eta_conserved_off_omega", c.eta_pass},
        {"axis_sums_conserved", c.axis_sum_pass}}},
      {"pass", c.pass()},
  };
}

json number(double v) { return std::isfinite(v) ? json(v) : json(std::to_string(v)); }

// Applies --clamp-epsilon: absent leaves the tensor alone, an empty value
// uses the default floor.
ltr::DenseTensor maybe_clamp(const ltr::DenseTensor& t, const CLI::Option* opt,
                             const std::string& value) {
  if (opt->count() == 0) return t;
  if (value.empty()) return ltr::clamp_floor(t);
  return ltr::clamp_floor(t, ltr::parse_double(value));
}

struct ReduceArgs {
  std::string input, output, rank, indices, mode_order, clamp, block_rule = "expansion";
  std::uint64_t seed = 0;
  bool certify = false;
};

int cmd_reduce(const ReduceArgs& a, const CLI::Option* clamp_opt) {
  const ltr::DenseTensor input = maybe_clamp(ltr::read_dten_file(a.input), clamp_opt, a.clamp);

  ltr::ReduceOptions opts;
  if (a.block_rule == "subtensor") {
    opts.rule = ltr::BlockRule::Subtensor;
  } else if (a.block_rule != "expansion") {
    throw ltr::ParseError("unknown block rule '" + a.block_rule + "'");
  }
  if (!a.mode_order.empty()) opts.mode_order = parse_sizes(a.mode_order, ",", "mode order");

  ltr::BingoSpec spec;
  if (!a.indices.empty()) {
    spec = load_spec(a.indices);
    spec.validate(input.shape());
    if (!a.rank.empty() && parse_rank(a.rank) != spec.rank()) {
      throw ltr::RankError("--rank " + a.rank + " disagrees with --indices");
    }
  } else {
    if (a.rank.empty()) throw ltr::RankError("--rank or --indices is required");
    spec = ltr::sample_bingo_spec(input.shape(), parse_rank(a.rank), a.seed);
  }

  const auto start = std::chrono::steady_clock::now();
  const ltr::ReduceResult res = ltr::reduce(input, spec, opts);
  const double runtime =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ltr::write_dten_file(a.output, res.tensor);

  json summary{
      {"kl", number(ltr::kl_divergence(input, res.tensor))},
      {"ls", ltr::ls_error(input, res.tensor)},
      {"runtime", runtime},
      {"spec", json::parse(ltr::to_json(spec))},
  };
  json skipped = json::array();
  for (const auto& b : res.skipped_blocks) skipped.push_back({b.mode, b.lo, b.hi});
  summary["skipped"] = skipped;

  int code = 0;
  if (a.certify) {
    if (!input.all_positive() || !res.tensor.all_positive()) {
      std::cerr << "warning: input has zero elements; certification skipped\n";
      summary["certificate"] = nullptr;
    } else {
      const ltr::CertificateTolerances tol;
      const auto cert = ltr::certify_projection(input, res.tensor, spec, tol);
      summary["certificate"] = certificate_json(cert, tol);
      if (!cert.pass()) code = kExitCertify;
    }
  } else if (!input.all_positive()) {
    std::cerr << "warning: input has zero elements; the projection guarantees do not apply\n";
  }
  std::cout << summary.dump() << '\n';
  return code;
}

int cmd_gen(const std::string& shape, std::uint64_t seed, const std::string& output) {
  const ltr::DenseTensor t = ltr::uniform_random(ltr::Shape(parse_sizes(shape, ",x", "shape")), seed);
  if (output.empty() || output == "-") {
    ltr::write_dten(std::cout, t);
  } else {
    ltr::write_dten_file(output, t);
  }
  return 0;
}

int cmd_rank1(const std::string& input, const std::string& output) {
  const ltr::DenseTensor t = ltr::read_dten_file(input);
  const auto r = ltr::best_rank1(t);
  if (!output.empty()) ltr::write_dten_file(output, r.tensor);
  json summary{
      {"kl", number(ltr::kl_divergence(t, r.tensor))},
      {"ls", ltr::ls_error(t, r.tensor)},
      {"lambda", r.factors.lambda},
      {"factors", r.factors.factors},
  };
  std::cout << summary.dump() << '\n';
  return 0;
}

int cmd_coords(const std::string& input, const std::string& kind, const std::string& output,
               const CLI::Option* clamp_opt, const std::string& clamp) {
  const ltr::DenseTensor t =
      ltr::normalized(maybe_clamp(ltr::read_dten_file(input), clamp_opt, clamp));
  const ltr::DenseTensor c = kind == "theta" ? ltr::theta_from_tensor(t).values
                                             : ltr::eta_from_tensor(t, true).values;
  if (output.empty() || output == "-") {
    ltr::write_dten(std::cout, c);
  } else {
    ltr::write_dten_file(output, c);
  }
  return 0;
}

int cmd_verify(const std::string& input, const std::string& output, const std::string& spec_arg,
               const ltr::CertificateTolerances& tol) {
  const ltr::DenseTensor in = ltr::read_dten_file(input);
  const ltr::DenseTensor out = ltr::read_dten_file(output);
  const ltr::BingoSpec spec = load_spec(spec_arg);
  try {
    spec.validate(in.shape());
  } catch (const ltr::RankError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerify;
  }
  if (in.shape() != out.shape()) {
    std::cerr << "error: input " << in.shape().to_string() << " and output "
              << out.shape().to_string() << " differ in shape\n";
    return kExitVerify;
  }
  const auto cert = ltr::certify_projection(in, out, spec, tol);
  std::cout << certificate_json(cert, tol).dump() << '\n';
  return cert.pass() ? 0 : kExitVerify;
}

struct BenchArgs {
  std::string methods = "ltr", shape = "30,30,30", ranks, csv, input;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  int ntd_iters = 200;
  unsigned threads = 0;
};

int cmd_bench(const BenchArgs& a) {
  ltr::BenchConfig cfg;
  cfg.methods.clear();
  std::stringstream ms(a.methods);
  for (std::string m; std::getline(ms, m, ',');) cfg.methods.push_back(m);
  if (!a.input.empty()) {
    cfg.input = ltr::read_dten_file(a.input);
    cfg.shape = cfg.input->shape();
  } else {
    cfg.shape = ltr::Shape(parse_sizes(a.shape, ",x", "shape"));
  }
  cfg.ranks = parse_rank_list(a.ranks, cfg.shape.order());
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.ntd_iters = a.ntd_iters;
  cfg.threads = a.threads;

  const auto records = ltr::run_bench(cfg);
  if (a.csv.empty() || a.csv == "-") {
    ltr::write_bench_csv(std::cout, records);
  } else {
    std::ofstream out(a.csv);
    if (!out) throw std::runtime_error("cannot write '" + a.csv + "'");
    ltr::write_bench_csv(out, records);
  }

  std::ostream& log = (a.csv.empty() || a.csv == "-") ? std::cerr : std::cout;
  log << "method   rank        n  runtime_s (mean +- se)        ls_err (mean +- se)"
         "           kl_err (mean +- se)\n";
  char line[256];
  for (const auto& s : ltr::summarize(records)) {
    std::snprintf(line, sizeof line, "%-8s %-10s %2zu  %.6e +- %.2e  %.6e +- %.2e  %.6e +- %.2e\n",
                  s.method.c_str(), s.rank.to_string().c_str(), s.n, s.runtime_mean,
                  s.runtime_se, s.ls_mean, s.ls_se, s.kl_mean, s.kl_se);
    log << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Legendre Tucker rank reduction for non-negative tensors"};
  app.require_subcommand(1);
  std::function<int()> action;

  // gen
  std::string gen_shape, gen_out;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Write a seeded uniform [0, 1) tensor");
  gen->add_option("--shape", gen_shape, "Extents, e.g. 30,30,30")->required();
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--output,-o", gen_out, "Output file (default stdout)");
  gen->callback([&] { action = [&] { return cmd_gen(gen_shape, gen_seed, gen_out); }; });

  // reduce
  ReduceArgs ra;
  auto* red = app.add_subcommand("reduce", "Reduce the Tucker rank of a tensor");
  red->add_option("--input,-i", ra.input, "Input tensor (dten)")->required();
  red->add_option("--output,-o", ra.output, "Output tensor (dten)")->required();
  red->add_option("--rank,-r", ra.rank, "Target Tucker rank r1,r2,...");
  red->add_option("--seed", ra.seed, "Seed for sampling the bingo indices");
  red->add_option("--indices", ra.indices, "Bingo spec as JSON text or a JSON file");
  red->add_option("--mode-order", ra.mode_order, "Mode processing order, e.g. 3,1,2");
  auto* red_clamp = red->add_option("--clamp-epsilon", ra.clamp,
                                    "Floor small elements (no value: 1e-12 x max)")
                        ->expected(0, 1);
  red->add_flag("--certify", ra.certify, "Check the projection conditions on the result");
  red->add_option("--block-rule", ra.block_rule, "expansion (default) or subtensor")
      ->check(CLI::IsMember({"expansion", "subtensor"}));
  red->callback([&] { action = [&] { return cmd_reduce(ra, red_clamp); }; });

  // rank1
  std::string r1_in, r1_out;
  auto* r1 = app.add_subcommand("rank1", "Best rank-1 approximation under the KL divergence");
  r1->add_option("--input,-i", r1_in, "Input tensor (dten)")->required();
  r1->add_option("--output,-o", r1_out, "Output tensor (dten)");
  r1->callback([&] { action = [&] { return cmd_rank1(r1_in, r1_out); }; });

  // coords
  std::string co_in, co_out, co_kind = "theta", co_clamp;
  auto* co = app.add_subcommand("coords", "Emit theta or eta coordinates of the normalized tensor");
  co->add_option("--input,-i", co_in, "Input tensor (dten)")->required();
  co->add_option("--coords", co_kind, "theta or eta")->check(CLI::IsMember({"theta", "eta"}));
  co->add_option("--output,-o", co_out, "Output file (default stdout)");
  auto* co_clamp_opt = co->add_option("--clamp-epsilon", co_clamp, "Floor small elements")
                           ->expected(0, 1);
  co->callback([&] {
    action = [&] { return cmd_coords(co_in, co_kind, co_out, co_clamp_opt, co_clamp); };
  });

  // verify
  std::string ve_in, ve_out, ve_spec;
  ltr::CertificateTolerances ve_tol;
  auto* ve = app.add_subcommand("verify", "Certify an input/output pair as the projection");
  ve->add_option("--input,-i", ve_in, "Original tensor (dten)")->required();
  ve->add_option("--output,-o", ve_out, "Reduced tensor (dten)")->required();
  ve->add_option("--spec", ve_spec, "Bingo spec as JSON text or a JSON file")->required();
  ve->add_option("--theta-tol", ve_tol.theta, "Tolerance on theta over the bingo set");
  ve->add_option("--eta-tol", ve_tol.eta, "Tolerance on eta drift elsewhere");
  ve->add_option("--axis-tol", ve_tol.axis_sum, "Relative tolerance on axis sums");
  ve->callback([&] { action = [&] { return cmd_verify(ve_in, ve_out, ve_spec, ve_tol); }; });

  // bench
  BenchArgs ba;
  auto* be = app.add_subcommand("bench", "Time LTR against NTD baselines, write CSV");
  be->add_option("--methods", ba.methods, "Comma list of ltr, ntd_ls, ntd_kl");
  be->add_option("--shape", ba.shape, "Extents of the generated tensors");
  be->add_option("--ranks", ba.ranks, "Comma list of ranks; each a scalar or r1xr2x...")
      ->required();
  be->add_option("--trials", ba.trials, "Trials per (method, rank)")->check(CLI::PositiveNumber);
  be->add_option("--seed", ba.seed, "Base seed");
  be->add_option("--csv", ba.csv, "CSV output file (default stdout)");
  be->add_option("--input,-i", ba.input, "Use this tensor for every trial");
  be->add_option("--ntd-iters", ba.ntd_iters, "Iteration budget for NTD")
      ->check(CLI::PositiveNumber);
  be->add_option("--threads", ba.threads, "Worker threads (default LTR_THREADS or all cores)");
  be->callback([&] { action = [&] { return cmd_bench(ba); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    return action();
  } catch (const ltr::RankError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRank;
  } catch (const ltr::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::domain_error& e) {
    // Negative or non-positive elements where the operation forbids them.
    std::cerr << "error: " << e.what() << '\n';
    return kExitMalformed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
