#pragma once

#include <functional>
#include <stdexcept>

namespace karst {

/// Coefficients and sources of the coupled matrix/conduit flow problem.
/// Dirichlet data is homogeneous throughout.
struct ProblemData {
  double conductivity = 1.0;          // matrix (scalar tensor K*I)
  double conduit_conductivity = 1.0;  // D
  double exchange = 0.0;              // alpha_ex >= 0
  std::function<double(double, double)> source_matrix = [](double, double) { return 0.0; };
  std::function<double(double)> source_conduit = [](double) { return 0.0; };

  void validate() const {
    if (!(conductivity > 0.0)) throw std::invalid_argument("problem: conductivity must be positive");
    if (!(conduit_conductivity > 0.0))
      throw std::invalid_argument("problem: conduit conductivity must be positive");
    if (exchange < 0.0) throw std::invalid_argument("problem: exchange coefficient must be >= 0");
  }

  /// K = k*g/mu and D = d^3*g/(12*mu) from permeability, viscosity, gravity
  /// and conduit width.
  static ProblemData from_physical(double permeability, double viscosity, double gravity,
                                   double conduit_width, double exchange_coefficient) {
    ProblemData p;
    p.conductivity = permeability * gravity / viscosity;
    p.conduit_conductivity = conduit_width * conduit_width * conduit_width * gravity / (12.0 * viscosity);
    p.exchange = exchange_coefficient;
    p.validate();
    return p;
  }
};

}  // namespace karst
