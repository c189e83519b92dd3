#pragma once

#include <functional>
#include <span>

#include "focus/grad/tape.hpp"

namespace focus::grad {

using ScalarFunction = std::function<double(std::span<const double>)>;

// Central differences (f(p + eps e_i) - f(p - eps e_i)) / (2 eps) for every i.
// Throws DomainError unless eps > 0.
GradVector finite_diff_grad(const ScalarFunction& eval, std::span<const double> params,
                            double eps);

}  // namespace focus::grad
