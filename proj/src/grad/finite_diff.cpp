#include "focus/grad/finite_diff.hpp"

#include <vector>

#include "focus/error.hpp"

namespace focus::grad {

GradVector finite_diff_grad(const ScalarFunction& eval, std::span<const double> params,
                            double eps) {
  if (!(eps > 0.0)) throw DomainError("finite difference step must be positive");
  std::vector<double> probe(params.begin(), params.end());
  GradVector out{std::vector<double>(params.size())};
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double up = eval(probe);
    probe[i] = saved - eps;
    const double down = eval(probe);
    probe[i] = saved;
    out.values[i] = (up - down) / (2.0 * eps);
  }
  return out;
}

}  // namespace focus::grad
