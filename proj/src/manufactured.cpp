#include "karst/manufactured.hpp"

#include <cmath>
#include <stdexcept>

namespace karst {

double ManufacturedCase::interface_identity_residual(double x) const {
  const double s = exact_conduit(x);
  // [d_y u]_{y=0} = 2 s phi'(0), phi'(0) = -a + b H_m.
  const double jump = 2.0 * s * (-layer_a + layer_b * geometry.half_height);
  const double trace = s * layer_a * geometry.half_height;
  return data.conductivity * jump - data.exchange * (trace - s);
}

ManufacturedCase make_layered_case(const DomainGeometry& geom, double conductivity,
                                   double conduit_conductivity, double exchange,
                                   double interface_value) {
  if (!(conductivity > 0.0))
    throw std::invalid_argument("layered case: conductivity must be positive (b unbounded otherwise)");

  ManufacturedCase c;
  c.tag = (exchange == 0.0 && interface_value == 1.0) ? ManufacturedCase::Tag::SmoothDecoupled
                                                      : ManufacturedCase::Tag::LayeredCoupled;
  c.geometry = geom;

  const double L = geom.length;
  const double H = geom.half_height;
  const double a = interface_value / H;
  const double b = (exchange * (a * H - 1.0) / conductivity + 2.0 * a) / (2.0 * H);
  c.layer_a = a;
  c.layer_b = b;

  const double w = M_PI / L;
  auto s = [w](double x) { return std::sin(w * x); };
  auto ds = [w](double x) { return w * std::cos(w * x); };
  auto phi = [H, a, b](double t) { return (H - t) * (a + b * t); };
  auto dphi = [H, a, b](double t) { return -a + b * (H - 2.0 * t); };

  c.exact_matrix = [s, phi](double x, double y) { return s(x) * phi(std::abs(y)); };
  c.exact_matrix_gradient = [s, ds, phi, dphi](double x, double y) {
    const double sign = y >= 0.0 ? 1.0 : -1.0;
    return Vec2(ds(x) * phi(std::abs(y)), s(x) * sign * dphi(std::abs(y)));
  };
  c.exact_conduit = s;
  c.exact_conduit_deriv = ds;

  c.data.conductivity = conductivity;
  c.data.conduit_conductivity = conduit_conductivity;
  c.data.exchange = exchange;
  // f^m = -K lap(u) with phi'' = -2b, per half.
  c.data.source_matrix = [conductivity, w, s, phi, b](double x, double y) {
    return conductivity * s(x) * (w * w * phi(std::abs(y)) + 2.0 * b);
  };
  // f^c = D (pi/L)^2 u^c - alpha (u^m(.,0) - u^c).
  const double conduit_factor =
      conduit_conductivity * w * w - exchange * (interface_value - 1.0);
  c.data.source_conduit = [s, conduit_factor](double x) { return conduit_factor * s(x); };
  c.data.validate();
  return c;
}

ManufacturedCase make_smooth_decoupled_case(const DomainGeometry& geom, double conductivity,
                                            double conduit_conductivity) {
  return make_layered_case(geom, conductivity, conduit_conductivity, 0.0, 1.0);
}

}  // namespace karst
