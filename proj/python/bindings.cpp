#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "ltr/errors.hpp"
#include "ltr/infogeo.hpp"
#include "ltr/ntd.hpp"
#include "ltr/rank1.hpp"
#include "ltr/reduce.hpp"
#include "ltr/tensor.hpp"
#include "ltr/verify.hpp"

namespace py = pybind11;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

ltr::DenseTensor to_tensor(const Array& a) {
  std::vector<std::size_t> dims(a.shape(), a.shape() + a.ndim());
  if (dims.empty()) dims.push_back(1);
  const double* p = a.data();
  return ltr::DenseTensor(ltr::Shape(std::move(dims)), std::vector<double>(p, p + a.size()));
}

Array to_array(const ltr::DenseTensor& t) {
  Array out(t.shape().dims());
  std::copy(t.data().begin(), t.data().end(), out.mutable_data());
  return out;
}

Array matrix_to_array(const Eigen::MatrixXd& m) {
  Array out({static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())});
  auto v = out.mutable_unchecked<2>();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(i, j) = m(i, j);
  }
  return out;
}

ltr::BlockRule parse_rule(const std::string& rule) {
  if (rule == "expansion") return ltr::BlockRule::ModeExpansion;
  if (rule == "subtensor") return ltr::BlockRule::Subtensor;
  throw py::value_error("rule must be 'expansion' or 'subtensor'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Legendre Tucker rank reduction for non-negative tensors";

  py::register_exception<ltr::ParseError>(m, "ParseError", PyExc_ValueError);

  m.def("best_rank1", [](const Array& a) {
    const auto r = ltr::best_rank1(to_tensor(a));
    return py::make_tuple(to_array(r.tensor), r.factors.lambda, r.factors.factors);
  }, py::arg("t"), "KL-optimal rank-1 approximation; returns (tensor, lambda, factors).");

  m.def("is_rank1", [](const Array& a, double tol) { return ltr::is_rank1(to_tensor(a), tol); },
        py::arg("t"), py::arg("tol") = 1e-9);

  m.def("sample_bingo_spec",
        [](std::vector<std::size_t> shape, std::vector<std::size_t> ranks, std::uint64_t seed) {
          return ltr::sample_bingo_spec(ltr::Shape(std::move(shape)), {std::move(ranks)}, seed)
              .modes;
        },
        py::arg("shape"), py::arg("ranks"), py::arg("seed") = 0);

  m.def("reduce",
        [](const Array& a, std::optional<std::vector<std::size_t>> ranks, std::uint64_t seed,
           std::optional<std::vector<std::vector<std::size_t>>> indices,
           std::vector<std::size_t> mode_order, const std::string& rule) {
          const ltr::DenseTensor t = to_tensor(a);
          ltr::BingoSpec spec;
          if (indices) {
            spec.modes = *indices;
          } else if (ranks) {
            spec = ltr::sample_bingo_spec(t.shape(), {*ranks}, seed);
          } else {
            throw py::value_error("pass ranks or indices");
          }
          ltr::ReduceOptions opts{std::move(mode_order), parse_rule(rule)};
          const auto res = ltr::reduce(t, spec, opts);
          return py::make_tuple(to_array(res.tensor), res.spec.modes);
        },
        py::arg("t"), py::arg("ranks") = py::none(), py::arg("seed") = 0,
        py::arg("indices") = py::none(), py::arg("mode_order") = std::vector<std::size_t>{},
        py::arg("rule") = "expansion",
        "Reduce the Tucker rank; returns (tensor, bingo index sets).");

  m.def("worst_case_cost", [](std::vector<std::size_t> shape, std::vector<std::size_t> ranks) {
    return ltr::worst_case_cost(ltr::Shape(std::move(shape)), {std::move(ranks)});
  });

  m.def("mode_k_expansion",
        [](const Array& a, std::size_t mode) {
          return matrix_to_array(ltr::mode_k_expansion(to_tensor(a), mode));
        },
        py::arg("t"), py::arg("mode"));

  m.def("theta", [](const Array& a) { return to_array(ltr::theta_from_tensor(to_tensor(a)).values); },
        py::arg("t"), "Theta coordinates of a normalized positive tensor.");
  m.def("eta", [](const Array& a) { return to_array(ltr::eta_from_tensor(to_tensor(a)).values); },
        py::arg("t"));
  m.def("from_theta",
        [](const Array& a, bool renormalize) {
          return to_array(ltr::tensor_from_theta({to_tensor(a)}, renormalize));
        },
        py::arg("theta"), py::arg("renormalize") = false);
  m.def("from_eta", [](const Array& a) { return to_array(ltr::tensor_from_eta({to_tensor(a)})); },
        py::arg("eta"));

  m.def("detect_bingos",
        [](const Array& a, std::size_t mode, double tol) {
          return ltr::detect_bingos(to_tensor(a), mode, tol);
        },
        py::arg("t"), py::arg("mode"), py::arg("tol") = ltr::kDefaultBingoTol);

  m.def("kl_divergence", [](const Array& p, const Array& q) {
    return ltr::kl_divergence(to_tensor(p), to_tensor(q));
  });
  m.def("ls_error", [](const Array& p, const Array& q) {
    return ltr::ls_error(to_tensor(p), to_tensor(q));
  });

  m.def("tucker_rank",
        [](const Array& a, double tol) { return ltr::numerical_tucker_rank(to_tensor(a), tol).ranks; },
        py::arg("t"), py::arg("tol") = ltr::kDefaultSvdTol);

  m.def("certify",
        [](const Array& in, const Array& out, std::vector<std::vector<std::size_t>> modes) {
          const auto c = ltr::certify_projection(to_tensor(in), to_tensor(out), {std::move(modes)});
          py::dict d;
          d["max_theta_on_omega"] = c.max_theta_on_omega;
          d["max_eta_drift_off_omega"] = c.max_eta_drift_off_omega;
          d["max_axis_sum_drift"] = c.max_axis_sum_drift;
          d["omega_size"] = c.omega_size;
          d["pass"] = c.pass();
          return d;
        },
        py::arg("input"), py::arg("output"), py::arg("indices"));

  m.def("ntd_fit",
        [](const Array& a, std::vector<std::size_t> ranks, const std::string& objective,
           int max_iters, std::uint64_t seed) {
          ltr::NtdOptions opts;
          if (objective == "kl") {
            opts.objective = ltr::NtdObjective::KullbackLeibler;
          } else if (objective != "ls") {
            throw py::value_error("objective must be 'ls' or 'kl'");
          }
          opts.max_iters = max_iters;
          opts.seed = seed;
          const auto r = ltr::ntd_fit(to_tensor(a), {std::move(ranks)}, opts);
          py::list factors;
          for (const auto& f : r.model.factors) factors.append(matrix_to_array(f));
          return py::make_tuple(to_array(r.model.core), factors, r.objective_trace);
        },
        py::arg("t"), py::arg("ranks"), py::arg("objective") = "ls", py::arg("max_iters") = 200,
        py::arg("seed") = 0, "Returns (core, factors, objective trace).");
}
