#pragma once

#include <functional>
#include <vector>

#include "geomsign/tape.hpp"

namespace geomsign {

// Central finite differences against the tape's analytic gradients.
// `program` rebuilds the computation on a fresh tape from the given
// parameter leaves and returns the scalar loss id. Runs in binary64.
//
// Relative error uses max(|analytic|, |numeric|, floor) as denominator.
struct GradCheckResult {
  double max_rel_error = 0;
  size_t worst_param = 0;
  size_t worst_coord = 0;
};

using TensorProgram =
    std::function<Tape<double>::Id(Tape<double>&, const std::vector<Tape<double>::Id>&)>;

inline GradCheckResult gradient_check(const TensorProgram& program,
                                      std::vector<Tensor<double>> params, double h = 1e-5,
                                      double denom_floor = 1e-8) {
  auto eval = [&](const std::vector<Tensor<double>>& ps) {
    Tape<double> tape;
    std::vector<Tape<double>::Id> ids;
    ids.reserve(ps.size());
    for (const auto& p : ps) ids.push_back(tape.leaf(p, true));
    const auto loss = program(tape, ids);
    return static_cast<double>(tape.val(loss).data[0]);
  };

  // analytic pass
  Tape<double> tape;
  std::vector<Tape<double>::Id> ids;
  for (const auto& p : params) ids.push_back(tape.leaf(p, true));
  const auto loss = program(tape, ids);
  tape.backward(loss);
  std::vector<Tensor<double>> analytic;
  for (size_t i = 0; i < params.size(); ++i) {
    const auto* g = tape.grad_of(ids[i]);
    analytic.push_back(g ? *g : Tensor<double>(params[i].shape));
  }

  GradCheckResult res;
  for (size_t i = 0; i < params.size(); ++i) {
    for (size_t j = 0; j < params[i].numel(); ++j) {
      const double keep = params[i].data[j];
      params[i].data[j] = keep + h;
      const double fp = eval(params);
      params[i].data[j] = keep - h;
      const double fm = eval(params);
      params[i].data[j] = keep;
      const double numeric = (fp - fm) / (2.0 * h);
      const double a = analytic[i].data[j];
      const double denom = std::max({std::abs(a), std::abs(numeric), denom_floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > res.max_rel_error) {
        res.max_rel_error = rel;
        res.worst_param = i;
        res.worst_coord = j;
      }
    }
  }
  return res;
}

}  // namespace geomsign
