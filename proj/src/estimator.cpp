#include "karst/estimator.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "karst/clement.hpp"
#include "karst/quadrature.hpp"

namespace karst {

bool mode_is_isotropic(EstimatorMode mode) {
  return mode == EstimatorMode::IsotropicConforming ||
         mode == EstimatorMode::IsotropicNonconforming;
}

bool mode_is_nonconforming(EstimatorMode mode) {
  return mode == EstimatorMode::AnisotropicNonconforming ||
         mode == EstimatorMode::IsotropicNonconforming;
}

EstimatorMode make_mode(bool nonconforming, bool isotropic) {
  if (isotropic)
    return nonconforming ? EstimatorMode::IsotropicNonconforming
                         : EstimatorMode::IsotropicConforming;
  return nonconforming ? EstimatorMode::AnisotropicNonconforming
                       : EstimatorMode::AnisotropicConforming;
}

std::string mode_to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::AnisotropicConforming: return "anisotropic-conforming";
    case EstimatorMode::AnisotropicNonconforming: return "anisotropic-nonconforming";
    case EstimatorMode::IsotropicConforming: return "isotropic-conforming";
    case EstimatorMode::IsotropicNonconforming: return "isotropic-nonconforming";
  }
  return "?";
}

ProjectedData project_data(const ProblemData& data, const Mesh& mesh, int quad_degree) {
  ProjectedData out;
  const FamilyTag map_family = clement_family(mesh);

  std::vector<Poly2> monos;
  if (mesh.is_triangular())
    monos = {Poly2::monomial(0, 0), Poly2::monomial(1, 0), Poly2::monomial(0, 1)};
  else
    monos = {Poly2::monomial(0, 0), Poly2::monomial(1, 0), Poly2::monomial(0, 1),
             Poly2::monomial(1, 1)};
  const int nm = static_cast<int>(monos.size());

  out.matrix_source.reserve(mesh.elements.size());
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const Element& el = mesh.elements[k];
    const AffineMap map = element_map(mesh, k, map_family);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(nm, nm);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(nm);
    for (const auto& q : reference_rule(el.shape, quad_degree)) {
      const Vec2 p = map.to_physical(q.xy);
      const double f = data.source_matrix(p.x(), p.y());
      std::array<double, 4> m{};
      for (int i = 0; i < nm; ++i) m[i] = monos[i](q.xy);
      for (int i = 0; i < nm; ++i) {
        for (int j = 0; j < nm; ++j) mass(i, j) += q.w * m[i] * m[j];
        load[i] += q.w * m[i] * f;
      }
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(mass);
    if (!lu.isInvertible())
      throw std::runtime_error("project_data: singular local mass matrix (corrupt mesh?)");
    const Eigen::VectorXd c = lu.solve(load);
    Poly2 fk;
    for (int i = 0; i < nm; ++i) {
      Poly2 term(Eigen::MatrixXd(monos[i].coefficients() * c[i]));
      fk += term;
    }
    out.matrix_source.push_back(fk);
  }

  const auto eq = edge_rule(quad_degree);
  out.conduit_source.reserve(mesh.conduit_edges.size());
  for (int ge : mesh.conduit_edges) {
    double mean = 0.0;
    for (const auto& q : eq) mean += q.w * data.source_conduit(mesh.edge_point(ge, q.x).x());
    out.conduit_source.push_back(mean);
  }
  return out;
}

namespace {

struct EdgeCaches {
  std::vector<double> flux_sq;     // ||[K grad u . n]||^2_E, interior matrix edges
  std::vector<double> jump_sq;     // ||[u]||^2_E, interior matrix + conduit edges
  std::vector<double> conduit_sq;  // ||r_E||^2_E, conduit edges (by edge id)
  std::vector<double> osc_sq;      // ||f^c - f^c_E||^2_E, conduit edges (by edge id)
};

EdgeCaches build_edge_caches(const FeFunction& u_h, const ProblemData& data,
                             const ProjectedData& proj, bool nonconforming, int quad_degree,
                             int data_quad_degree) {
  const Mesh& mesh = u_h.dofmap->mesh();
  const int ne = static_cast<int>(mesh.edges.size());
  EdgeCaches caches;
  caches.flux_sq.assign(ne, 0.0);
  caches.jump_sq.assign(ne, 0.0);
  caches.conduit_sq.assign(ne, 0.0);
  caches.osc_sq.assign(ne, 0.0);

  const auto eq = edge_rule(quad_degree);
  const auto eq_data = edge_rule(data_quad_degree);

  for (int ge = 0; ge < ne; ++ge) {
    const Edge& e = mesh.edges[ge];
    if (e.location == EdgeLocation::Boundary) continue;
    if (e.location == EdgeLocation::InteriorMatrix) {
      double acc = 0.0;
      for (const auto& q : eq) {
        const double j = jump_normal_flux(u_h, ge, q.x, data.conductivity);
        acc += q.w * e.length * j * j;
      }
      caches.flux_sq[ge] = acc;
    }
    if (nonconforming) {
      double acc = 0.0;
      for (const auto& q : eq) {
        const double j = jump_value(u_h, ge, q.x);
        acc += q.w * e.length * j * j;
      }
      caches.jump_sq[ge] = acc;
    }
  }

  for (int ci = 0; ci < static_cast<int>(mesh.conduit_edges.size()); ++ci) {
    const int ge = mesh.conduit_edges[ci];
    const Edge& e = mesh.edges[ge];
    double acc = 0.0;
    for (const auto& q : eq) {
      const double r = proj.conduit_source[ci] +
                       data.conduit_conductivity * u_h.conduit_second(ci, q.x) +
                       data.exchange * (u_h.interface_trace(ci, q.x) - u_h.conduit_value(ci, q.x));
      acc += q.w * e.length * r * r;
    }
    caches.conduit_sq[ge] = acc;

    double osc = 0.0;
    for (const auto& q : eq_data) {
      const double d = data.source_conduit(mesh.edge_point(ge, q.x).x()) - proj.conduit_source[ci];
      osc += q.w * e.length * d * d;
    }
    caches.osc_sq[ge] = osc;
  }
  return caches;
}

}  // namespace

EstimatorReport estimate(const FeFunction& u_h, const ProblemData& data,
                         const ProjectedData& proj, EstimatorMode mode,
                         const EstimatorOptions& opts) {
  const Mesh& mesh = u_h.dofmap->mesh();
  const DofMap& dm = *u_h.dofmap;
  const bool isotropic = mode_is_isotropic(mode);
  const bool nonconforming = mode_is_nonconforming(mode);

  const int deg = opts.quad_degree > 0 ? opts.quad_degree : 2 * dm.reference().degree + 2;
  const int data_deg = opts.data_quad_degree > 0 ? opts.data_quad_degree : deg + 4;

  const EdgeCaches caches =
      build_edge_caches(u_h, data, proj, nonconforming, deg, data_deg);

  const FamilyTag proj_family = clement_family(mesh);
  const CellShape shape = mesh.is_triangular() ? CellShape::Triangle : CellShape::Rectangle;
  const QuadratureRule cell_rule = reference_rule(shape, deg);
  const QuadratureRule data_rule = reference_rule(shape, data_deg);
  EstimatorReport rep;
  rep.mode = mode;
  rep.local.resize(mesh.elements.size());

  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const Element& el = mesh.elements[k];
    ElementIndicator& ind = rep.local[k];
    const double h_short = el.anisotropy.min_length();
    const double w_vol = isotropic ? el.diameter * el.diameter : h_short * h_short;

    // || f^m_K + K * lap(u_h) ||^2_K. f^m_K lives in reference coordinates of
    // the standard map; the discrete Laplacian is evaluated at the matching
    // physical point through the family map.
    const AffineMap proj_map = element_map(mesh, k, proj_family);
    const AffineMap fam_map = element_map(mesh, k, dm.family());
    double vol = 0.0;
    for (const auto& q : cell_rule) {
      const Vec2 p = proj_map.to_physical(q.xy);
      const double r =
          proj.matrix_source[k](q.xy) + data.conductivity * u_h.laplacian(k, fam_map.to_reference(p));
      vol += q.w * std::abs(proj_map.det) * r * r;
    }
    ind.volume_sq = w_vol * vol;

    // Data oscillation, volume part.
    double osc = 0.0;
    for (const auto& q : data_rule) {
      const Vec2 p = proj_map.to_physical(q.xy);
      const double d = data.source_matrix(p.x(), p.y()) - proj.matrix_source[k](q.xy);
      osc += q.w * std::abs(proj_map.det) * d * d;
    }
    ind.zeta_sq = w_vol * osc;

    for (int j = 0; j < el.vertex_count(); ++j) {
      const int ge = mesh.element_edges[k][j];
      const Edge& e = mesh.edges[ge];
      if (e.location == EdgeLocation::Boundary) continue;
      const double w_edge = isotropic ? e.length : h_short * h_short / e.avg_height;
      if (e.location == EdgeLocation::InteriorMatrix) {
        ind.flux_sq += w_edge * caches.flux_sq[ge];
      } else {  // conduit
        ind.conduit_sq += w_edge * caches.conduit_sq[ge];
        ind.zeta_sq += w_edge * caches.osc_sq[ge];
      }
      if (nonconforming) {
        const double w_jump = isotropic ? e.length : e.avg_height / (h_short * h_short);
        ind.jump_sq += w_jump * caches.jump_sq[ge];
      }
    }
  }

  double theta_sq = 0.0, zeta_sq = 0.0;
  for (const auto& ind : rep.local) {
    theta_sq += ind.theta_sq();
    zeta_sq += ind.zeta_sq;
  }
  rep.total_theta = std::sqrt(theta_sq);
  rep.total_zeta = std::sqrt(zeta_sq);
  return rep;
}

double alignment_measure(const Mesh& mesh, const ElementGradient& grad, int quad_degree) {
  double numer = 0.0, denom = 0.0;
  const FamilyTag map_family = clement_family(mesh);
  const QuadratureRule rule = reference_rule(
      mesh.is_triangular() ? CellShape::Triangle : CellShape::Rectangle, quad_degree);
  for (int k = 0; k < static_cast<int>(mesh.elements.size()); ++k) {
    const Element& el = mesh.elements[k];
    const AffineMap map = element_map(mesh, k, map_family);
    const Eigen::Matrix2d frame_t = el.anisotropy.frame().transpose();
    const double w_k = 1.0 / (el.anisotropy.min_length() * el.anisotropy.min_length());
    for (const auto& q : rule) {
      const Vec2 g = grad(k, q.xy, map.to_physical(q.xy));
      const double w = q.w * std::abs(map.det);
      numer += w * w_k * (frame_t * g).squaredNorm();
      denom += w * g.squaredNorm();
    }
  }
  if (denom <= 0.0) throw std::invalid_argument("alignment_measure: field has zero gradient");
  return std::sqrt(numer / denom);
}

double alignment_measure(const Mesh& mesh, const std::function<Vec2(const Vec2&)>& grad,
                         int quad_degree) {
  return alignment_measure(
      mesh, [&](int, const Vec2&, const Vec2& p) { return grad(p); }, quad_degree);
}

std::string EstimatorReport::to_json() const {
  nlohmann::json j;
  j["mode"] = mode_to_string(mode);
  j["theta"] = total_theta;
  j["zeta"] = total_zeta;
  if (alignment) {
    j["alignment_measure"] = *alignment;
    j["alignment_field"] = alignment_field;
  }
  std::vector<double> th, ze, vol, flux, cond, jump;
  for (int k = 0; k < static_cast<int>(local.size()); ++k) {
    th.push_back(theta_k(k));
    ze.push_back(zeta_k(k));
    vol.push_back(local[k].volume_sq);
    flux.push_back(local[k].flux_sq);
    cond.push_back(local[k].conduit_sq);
    jump.push_back(local[k].jump_sq);
  }
  j["theta_k"] = th;
  j["zeta_k"] = ze;
  j["breakdown"] = {{"volume_sq", vol},
                    {"flux_jump_sq", flux},
                    {"conduit_sq", cond},
                    {"nonconformity_sq", jump}};
  return j.dump(2);
}

std::string EstimatorReport::to_csv() const {
  std::ostringstream os;
  os << "element,theta,zeta,volume_sq,flux_jump_sq,conduit_sq,nonconformity_sq\n";
  char buf[256];
  for (int k = 0; k < static_cast<int>(local.size()); ++k) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", k, theta_k(k),
                  zeta_k(k), local[k].volume_sq, local[k].flux_sq, local[k].conduit_sq,
                  local[k].jump_sq);
    os << buf;
  }
  return os.str();
}

}  // namespace karst
