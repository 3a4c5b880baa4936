#include "karst/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace karst {

namespace {

ElementAnisotropy rectangle_anisotropy(double dx, double dy) {
  ElementAnisotropy a;
  // Ties (dx == dy) keep the x direction as the long axis.
  if (dx >= dy) {
    a.axis_long = Vec2(dx, 0.0);
    a.axis_short = Vec2(0.0, dy);
    a.len_long = dx;
    a.len_short = dy;
  } else {
    a.axis_long = Vec2(0.0, dy);
    a.axis_short = Vec2(dx, 0.0);
    a.len_long = dy;
    a.len_short = dx;
  }
  return a;
}

// Longest edge vector plus the perpendicular height vector onto the
// opposite vertex.
ElementAnisotropy triangle_anisotropy(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
  const std::array<std::array<Vec2, 3>, 3> picks = {{{p0, p1, p2}, {p1, p2, p0}, {p2, p0, p1}}};
  int best = 0;
  double best_len = -1.0;
  for (int i = 0; i < 3; ++i) {
    const double len = (picks[i][1] - picks[i][0]).norm();
    if (len > best_len) {
      best_len = len;
      best = i;
    }
  }
  const Vec2 a = picks[best][0], b = picks[best][1], c = picks[best][2];
  const Vec2 long_vec = b - a;
  const double t = (c - a).dot(long_vec) / long_vec.squaredNorm();
  const Vec2 foot = a + t * long_vec;

  ElementAnisotropy an;
  an.axis_long = long_vec;
  an.axis_short = c - foot;
  an.len_long = long_vec.norm();
  an.len_short = an.axis_short.norm();
  return an;
}

int find_interval(const std::vector<double>& grid, double x) {
  auto it = std::upper_bound(grid.begin(), grid.end(), x);
  int i = static_cast<int>(it - grid.begin()) - 1;
  i = std::max(0, std::min(i, static_cast<int>(grid.size()) - 2));
  return i;
}

}  // namespace

double Mesh::edge_height(int edge, int elem) const {
  return elements[elem].area / edges[edge].length;
}

Vec2 Mesh::edge_point(int edge, double s) const {
  const Edge& e = edges[edge];
  return (1.0 - s) * vertices[e.v[0]] + s * vertices[e.v[1]];
}

Vec2 Mesh::element_centroid(int elem) const {
  const Element& el = elements[elem];
  Vec2 c = Vec2::Zero();
  for (int k = 0; k < el.vertex_count(); ++k) c += vertices[el.v[k]];
  return c / el.vertex_count();
}

int Mesh::locate(const Vec2& p) const {
  const int ix = find_interval(grid_x, p.x());
  const int iy = find_interval(grid_y, p.y());
  const int rect = iy * grid_cols() + ix;
  if (!is_triangular()) return rect;
  // SW-NE diagonal: lower-right triangle first, then upper-left.
  const double x0 = grid_x[ix], x1 = grid_x[ix + 1];
  const double y0 = grid_y[iy], y1 = grid_y[iy + 1];
  const double side = (p.x() - x0) / (x1 - x0) - (p.y() - y0) / (y1 - y0);
  return 2 * rect + (side >= 0.0 ? 0 : 1);
}

double Mesh::total_area() const {
  double a = 0.0;
  for (const Element& el : elements) a += el.area;
  return a;
}

void Mesh::validate() const {
  auto fail = [](const std::string& what) { throw std::logic_error("mesh: " + what); };

  const double area_expect = 2.0 * geometry.length * geometry.half_height;
  if (std::abs(total_area() - area_expect) > 1e-12 * area_expect) fail("element areas do not tile the domain");

  for (const Element& el : elements) {
    const Eigen::Matrix2d c = el.anisotropy.frame();
    Eigen::Matrix2d g = c.transpose() * c;
    g(0, 0) -= el.anisotropy.len_long * el.anisotropy.len_long;
    g(1, 1) -= el.anisotropy.len_short * el.anisotropy.len_short;
    if (g.cwiseAbs().maxCoeff() > 1e-12) fail("anisotropy frame is not orthogonal");
    if (el.anisotropy.len_long < el.anisotropy.len_short) fail("anisotropy lengths out of order");
    bool crosses = false;
    bool below = false, above = false;
    for (int k = 0; k < el.vertex_count(); ++k) {
      const double y = vertices[el.v[k]].y();
      below = below || y < -1e-14;
      above = above || y > 1e-14;
    }
    crosses = below && above;
    if (crosses) fail("element crosses the conduit line");
  }

  for (const Edge& e : edges) {
    const int n = (e.elem_front >= 0 ? 1 : 0) + (e.elem_back >= 0 ? 1 : 0);
    if (e.location == EdgeLocation::Boundary && n != 1) fail("boundary edge with wrong incidence");
    if (e.location != EdgeLocation::Boundary && n != 2) fail("interior edge with wrong incidence");
    const Vec2 rot(-e.normal.y(), e.normal.x());
    if ((rot - e.tangent).norm() > 1e-14) fail("tangent is not normal rotated by +90 deg");
  }

  double x_cursor = 0.0;
  for (int ce : conduit_edges) {
    const Edge& e = edges[ce];
    const double xa = std::min(vertices[e.v[0]].x(), vertices[e.v[1]].x());
    const double xb = std::max(vertices[e.v[0]].x(), vertices[e.v[1]].x());
    if (std::abs(xa - x_cursor) > 1e-13) fail("conduit edges do not tile [0,L]");
    x_cursor = xb;
  }
  if (std::abs(x_cursor - geometry.length) > 1e-13) fail("conduit edges do not reach x=L");
}

Mesh build_tensor_mesh(const DomainGeometry& geom, std::vector<double> gx, std::vector<double> gy) {
  if (gx.size() < 2 || gy.size() < 2) throw std::invalid_argument("mesh: need at least one cell per direction");
  if (!std::is_sorted(gx.begin(), gx.end()) || !std::is_sorted(gy.begin(), gy.end()))
    throw std::invalid_argument("mesh: grid lines must be sorted");
  if (std::find(gy.begin(), gy.end(), 0.0) == gy.end())
    throw std::invalid_argument("mesh: grid_y must contain the conduit line y=0");

  Mesh m;
  m.geometry = geom;
  m.grid_x = std::move(gx);
  m.grid_y = std::move(gy);

  const int nx = m.grid_cols();
  const int ny = m.grid_rows();
  m.vertices.reserve((nx + 1) * (ny + 1));
  for (int iy = 0; iy <= ny; ++iy)
    for (int ix = 0; ix <= nx; ++ix) m.vertices.emplace_back(m.grid_x[ix], m.grid_y[iy]);

  auto vid = [nx](int ix, int iy) { return iy * (nx + 1) + ix; };

  m.elements.reserve(nx * ny);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      Element el;
      el.shape = CellShape::Rectangle;
      el.v = {vid(ix, iy), vid(ix + 1, iy), vid(ix + 1, iy + 1), vid(ix, iy + 1)};
      const double dx = m.grid_x[ix + 1] - m.grid_x[ix];
      const double dy = m.grid_y[iy + 1] - m.grid_y[iy];
      el.subdomain = (m.grid_y[iy + 1] <= 0.0) ? Subdomain::Lower : Subdomain::Upper;
      el.anisotropy = rectangle_anisotropy(dx, dy);
      el.area = dx * dy;
      el.diameter = std::hypot(dx, dy);
      m.elements.push_back(el);
    }
  }

  // Shared edge construction from cell connectivity.
  std::map<std::pair<int, int>, int> edge_of;
  m.element_edges.assign(m.elements.size(), {-1, -1, -1, -1});
  for (int k = 0; k < static_cast<int>(m.elements.size()); ++k) {
    const Element& el = m.elements[k];
    const int nv = el.vertex_count();
    for (int j = 0; j < nv; ++j) {
      const int a = el.v[j], b = el.v[(j + 1) % nv];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.v = {key.first, key.second};
        it = edge_of.emplace(key, static_cast<int>(m.edges.size())).first;
        m.edges.push_back(e);
      }
      m.element_edges[k][j] = it->second;
    }
  }

  // Incidence, orientation, classification.
  for (int k = 0; k < static_cast<int>(m.elements.size()); ++k) {
    for (int j = 0; j < m.elements[k].vertex_count(); ++j) {
      Edge& e = m.edges[m.element_edges[k][j]];
      if (e.elem_front < 0 && e.elem_back < 0)
        e.elem_back = k;  // provisional; sides fixed below
      else
        e.elem_front = k;
    }
  }

  for (int id = 0; id < static_cast<int>(m.edges.size()); ++id) {
    Edge& e = m.edges[id];
    const Vec2 a = m.vertices[e.v[0]], b = m.vertices[e.v[1]];
    e.length = (b - a).norm();
    Vec2 t0 = (b - a) / e.length;
    e.normal = Vec2(t0.y(), -t0.x());

    const Vec2 mid = 0.5 * (a + b);
    const bool on_boundary =
        e.elem_front < 0 || e.elem_back < 0;
    const bool on_conduit = std::abs(a.y()) == 0.0 && std::abs(b.y()) == 0.0;
    if (on_boundary) {
      e.location = EdgeLocation::Boundary;
      const int inner = e.inner_element();
      // Outward normal: away from the inner cell.
      if ((m.element_centroid(inner) - mid).dot(e.normal) > 0.0) e.normal = -e.normal;
      e.elem_front = -1;
      e.elem_back = inner;
      e.avg_height = m.edge_height(id, inner);
      e.avg_min_length = m.elements[inner].anisotropy.min_length();
    } else {
      e.location = on_conduit ? EdgeLocation::Conduit : EdgeLocation::InteriorMatrix;
      int k1 = e.elem_front, k2 = e.elem_back;
      if ((m.element_centroid(k1) - mid).dot(e.normal) < 0.0) std::swap(k1, k2);
      e.elem_front = k1;
      e.elem_back = k2;
      e.avg_height = 0.5 * (m.edge_height(id, k1) + m.edge_height(id, k2));
      e.avg_min_length =
          0.5 * (m.elements[k1].anisotropy.min_length() + m.elements[k2].anisotropy.min_length());
    }
    e.tangent = Vec2(-e.normal.y(), e.normal.x());
  }

  for (int id = 0; id < static_cast<int>(m.edges.size()); ++id)
    if (m.edges[id].location == EdgeLocation::Conduit) m.conduit_edges.push_back(id);
  std::sort(m.conduit_edges.begin(), m.conduit_edges.end(), [&](int a, int b) {
    return m.edge_point(a, 0.5).x() < m.edge_point(b, 0.5).x();
  });

  // Patches.
  m.vertex_patch.assign(m.vertices.size(), {});
  for (int k = 0; k < static_cast<int>(m.elements.size()); ++k)
    for (int j = 0; j < m.elements[k].vertex_count(); ++j)
      m.vertex_patch[m.elements[k].v[j]].push_back(k);

  m.element_patch.assign(m.elements.size(), {});
  for (int k = 0; k < static_cast<int>(m.elements.size()); ++k) {
    std::set<int> patch{k};
    for (int j = 0; j < m.elements[k].vertex_count(); ++j) {
      const Edge& e = m.edges[m.element_edges[k][j]];
      if (e.elem_front >= 0) patch.insert(e.elem_front);
      if (e.elem_back >= 0) patch.insert(e.elem_back);
    }
    m.element_patch[k].assign(patch.begin(), patch.end());
  }

  m.boundary_vertex.assign(m.vertices.size(), false);
  for (const Edge& e : m.edges)
    if (e.location == EdgeLocation::Boundary) {
      m.boundary_vertex[e.v[0]] = true;
      m.boundary_vertex[e.v[1]] = true;
    }

  return m;
}

Mesh build_graded_mesh(const DomainGeometry& geom, int nx, int ny, const Grading& grading) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("mesh: nx and ny must be positive");
  if (geom.length <= 0.0 || geom.half_height <= 0.0)
    throw std::invalid_argument("mesh: domain dimensions must be positive");
  const double q = grading.ratio;
  if (!(q > 0.0) || q > 1.0) throw std::invalid_argument("mesh: grading ratio must be in (0,1]");

  std::vector<double> gx(nx + 1);
  for (int i = 0; i <= nx; ++i) gx[i] = geom.length * i / nx;
  gx[nx] = geom.length;

  // Layer thicknesses per half, outermost first: t, t*q, ..., t*q^(ny-1),
  // normalised so they sum to H_m.
  std::vector<double> thick(ny);
  double sum = 0.0;
  for (int i = 0; i < ny; ++i) {
    thick[i] = std::pow(q, i);
    sum += thick[i];
  }
  for (double& t : thick) t *= geom.half_height / sum;

  std::vector<double> gy(2 * ny + 1);
  gy[0] = -geom.half_height;
  for (int i = 0; i < ny; ++i) gy[i + 1] = gy[i] + thick[i];
  gy[ny] = 0.0;
  for (int i = 0; i < ny; ++i) gy[ny + 1 + i] = -gy[ny - 1 - i];  // mirror
  gy[2 * ny] = geom.half_height;

  return build_tensor_mesh(geom, std::move(gx), std::move(gy));
}

Mesh split_to_triangles(const Mesh& mesh) {
  if (mesh.is_triangular()) throw std::invalid_argument("mesh: input already triangular");

  Mesh out;
  out.geometry = mesh.geometry;
  out.grid_x = mesh.grid_x;
  out.grid_y = mesh.grid_y;

  // Rebuild through the tensor constructor to share the edge/patch machinery:
  // first make a vertex-compatible skeleton, then replace elements.
  Mesh skeleton = build_tensor_mesh(mesh.geometry, mesh.grid_x, mesh.grid_y);
  out.vertices = skeleton.vertices;

  out.elements.reserve(2 * mesh.elements.size());
  out.triangle_parent.reserve(2 * mesh.elements.size());
  for (int k = 0; k < static_cast<int>(skeleton.elements.size()); ++k) {
    const Element& r = skeleton.elements[k];
    // SW-NE diagonal: (v0,v1,v2) and (v0,v2,v3).
    for (int half = 0; half < 2; ++half) {
      Element t;
      t.shape = CellShape::Triangle;
      t.v = half == 0 ? std::array<int, 4>{r.v[0], r.v[1], r.v[2], -1}
                      : std::array<int, 4>{r.v[0], r.v[2], r.v[3], -1};
      t.subdomain = r.subdomain;
      const Vec2 p0 = out.vertices[t.v[0]], p1 = out.vertices[t.v[1]], p2 = out.vertices[t.v[2]];
      t.area = 0.5 * std::abs((p1 - p0).x() * (p2 - p0).y() - (p1 - p0).y() * (p2 - p0).x());
      t.diameter = std::max({(p1 - p0).norm(), (p2 - p1).norm(), (p0 - p2).norm()});
      t.anisotropy = triangle_anisotropy(p0, p1, p2);
      out.elements.push_back(t);
      out.triangle_parent.push_back(k);
    }
  }

  // Edges, incidence, patches: same generic pass as build_tensor_mesh.
  std::map<std::pair<int, int>, int> edge_of;
  out.element_edges.assign(out.elements.size(), {-1, -1, -1, -1});
  for (int k = 0; k < static_cast<int>(out.elements.size()); ++k) {
    const Element& el = out.elements[k];
    for (int j = 0; j < 3; ++j) {
      const int a = el.v[j], b = el.v[(j + 1) % 3];
      const auto key = std::minmax(a, b);
      auto it = edge_of.find(key);
      if (it == edge_of.end()) {
        Edge e;
        e.v = {key.first, key.second};
        it = edge_of.emplace(key, static_cast<int>(out.edges.size())).first;
        out.edges.push_back(e);
      }
      out.element_edges[k][j] = it->second;
      Edge& e = out.edges[it->second];
      if (e.elem_back < 0)
        e.elem_back = k;
      else
        e.elem_front = k;
    }
  }

  for (int id = 0; id < static_cast<int>(out.edges.size()); ++id) {
    Edge& e = out.edges[id];
    const Vec2 a = out.vertices[e.v[0]], b = out.vertices[e.v[1]];
    e.length = (b - a).norm();
    Vec2 t0 = (b - a) / e.length;
    e.normal = Vec2(t0.y(), -t0.x());
    const Vec2 mid = 0.5 * (a + b);
    const bool on_conduit = a.y() == 0.0 && b.y() == 0.0;
    if (e.elem_front < 0) {
      e.location = EdgeLocation::Boundary;
      const int inner = e.elem_back;
      if ((out.element_centroid(inner) - mid).dot(e.normal) > 0.0) e.normal = -e.normal;
      e.avg_height = out.edge_height(id, inner);
      e.avg_min_length = out.elements[inner].anisotropy.min_length();
    } else {
      e.location = on_conduit ? EdgeLocation::Conduit : EdgeLocation::InteriorMatrix;
      int k1 = e.elem_front, k2 = e.elem_back;
      if ((out.element_centroid(k1) - mid).dot(e.normal) < 0.0) std::swap(k1, k2);
      e.elem_front = k1;
      e.elem_back = k2;
      e.avg_height = 0.5 * (out.edge_height(id, k1) + out.edge_height(id, k2));
      e.avg_min_length =
          0.5 * (out.elements[k1].anisotropy.min_length() + out.elements[k2].anisotropy.min_length());
    }
    e.tangent = Vec2(-e.normal.y(), e.normal.x());
  }

  for (int id = 0; id < static_cast<int>(out.edges.size()); ++id)
    if (out.edges[id].location == EdgeLocation::Conduit) out.conduit_edges.push_back(id);
  std::sort(out.conduit_edges.begin(), out.conduit_edges.end(), [&](int a, int b) {
    return out.edge_point(a, 0.5).x() < out.edge_point(b, 0.5).x();
  });

  out.vertex_patch.assign(out.vertices.size(), {});
  for (int k = 0; k < static_cast<int>(out.elements.size()); ++k)
    for (int j = 0; j < 3; ++j) out.vertex_patch[out.elements[k].v[j]].push_back(k);

  out.element_patch.assign(out.elements.size(), {});
  for (int k = 0; k < static_cast<int>(out.elements.size()); ++k) {
    std::set<int> patch{k};
    for (int j = 0; j < 3; ++j) {
      const Edge& e = out.edges[out.element_edges[k][j]];
      if (e.elem_front >= 0) patch.insert(e.elem_front);
      if (e.elem_back >= 0) patch.insert(e.elem_back);
    }
    out.element_patch[k].assign(patch.begin(), patch.end());
  }

  out.boundary_vertex.assign(out.vertices.size(), false);
  for (const Edge& e : out.edges)
    if (e.location == EdgeLocation::Boundary) {
      out.boundary_vertex[e.v[0]] = true;
      out.boundary_vertex[e.v[1]] = true;
    }

  return out;
}

MeshAssumptionReport check_mesh_assumptions(const Mesh& mesh, double threshold) {
  MeshAssumptionReport rep;
  rep.threshold = threshold;

  for (const auto& patch : mesh.vertex_patch)
    rep.max_vertex_valence = std::max(rep.max_vertex_valence, static_cast<int>(patch.size()));

  // Touching = sharing at least a vertex.
  for (const auto& patch : mesh.vertex_patch) {
    for (int a : patch) {
      for (int b : patch) {
        const auto& pa = mesh.elements[a].anisotropy;
        const auto& pb = mesh.elements[b].anisotropy;
        rep.max_size_ratio = std::max({rep.max_size_ratio, pa.len_long / pb.len_long,
                                       pa.len_short / pb.len_short});
      }
    }
  }

  for (int id = 0; id < static_cast<int>(mesh.edges.size()); ++id) {
    const Edge& e = mesh.edges[id];
    for (int elem : {e.elem_front, e.elem_back}) {
      if (elem < 0) continue;
      const double h = mesh.edge_height(id, elem);
      rep.max_edge_height_ratio =
          std::max({rep.max_edge_height_ratio, e.avg_height / h, h / e.avg_height});
    }
  }

  rep.ratio_ok = rep.max_size_ratio <= threshold;
  const int valence_limit = mesh.is_triangular() ? 8 : 4;
  rep.valence_ok = rep.max_vertex_valence <= valence_limit;
  return rep;
}

Mesh refine(const Mesh& mesh, const std::vector<int>& marked) {
  if (mesh.is_triangular())
    throw std::invalid_argument("mesh: refine expects a rectangle mesh");
  if (marked.empty()) return mesh;

  std::set<int> split_x, split_y;
  const int nx = mesh.grid_cols();
  for (int k : marked) {
    if (k < 0 || k >= static_cast<int>(mesh.elements.size()))
      throw std::invalid_argument("mesh: marked element out of range");
    split_x.insert(k % nx);
    split_y.insert(k / nx);
  }

  std::vector<double> gx, gy;
  for (int i = 0; i + 1 < static_cast<int>(mesh.grid_x.size()); ++i) {
    gx.push_back(mesh.grid_x[i]);
    if (split_x.count(i)) gx.push_back(0.5 * (mesh.grid_x[i] + mesh.grid_x[i + 1]));
  }
  gx.push_back(mesh.grid_x.back());
  for (int i = 0; i + 1 < static_cast<int>(mesh.grid_y.size()); ++i) {
    gy.push_back(mesh.grid_y[i]);
    if (split_y.count(i)) gy.push_back(0.5 * (mesh.grid_y[i] + mesh.grid_y[i + 1]));
  }
  gy.push_back(mesh.grid_y.back());

  return build_tensor_mesh(mesh.geometry, std::move(gx), std::move(gy));
}

Mesh refine_all(const Mesh& mesh) {
  std::vector<int> all(mesh.is_triangular() ? mesh.elements.size() / 2 : mesh.elements.size());
  for (int i = 0; i < static_cast<int>(all.size()); ++i) all[i] = i;
  if (!mesh.is_triangular()) return refine(mesh, all);
  Mesh rect = build_tensor_mesh(mesh.geometry, mesh.grid_x, mesh.grid_y);
  return split_to_triangles(refine(rect, all));
}

double grading_ratio_for_min_thickness(double half_height, int ny, double t_min) {
  if (ny == 1) return 1.0;
  if (!(t_min > 0.0) || t_min * ny > half_height + 1e-12)
    throw std::invalid_argument("mesh: infeasible minimal layer thickness");
  if (std::abs(t_min * ny - half_height) < 1e-13 * half_height) return 1.0;
  // Innermost layer t0*q^(ny-1) with t0 = H*(1-q)/(1-q^ny); monotone in q.
  auto t_of = [&](double q) {
    const double t0 = half_height * (1.0 - q) / (1.0 - std::pow(q, ny));
    return t0 * std::pow(q, ny - 1);
  };
  double lo = 1e-8, hi = 1.0 - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (t_of(mid) < t_min ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Mesh graded_mesh_for_aspect(const DomainGeometry& geom, int nx, double aspect) {
  const double hx = geom.length / nx;
  const double t_min = hx / aspect;
  if (t_min >= geom.half_height) {
    return build_graded_mesh(geom, nx, 1, Grading::uniform());
  }
  // Small targets: uniform layers of thickness hx/aspect, so the outermost
  // cells do not exceed the requested ratio.
  if (aspect < 4.0) {
    const int ny = std::max(1, static_cast<int>(std::lround(geom.half_height / t_min)));
    return build_graded_mesh(geom, nx, ny, Grading::uniform());
  }
  // Pick the layer count so the resulting ratio stays moderate (q ~ 0.5).
  int ny = std::max(1, static_cast<int>(std::ceil(std::log2(geom.half_height / t_min))));
  double q = grading_ratio_for_min_thickness(geom.half_height, ny, t_min);
  while (q < 0.45 && ny < 64) {
    ++ny;
    q = grading_ratio_for_min_thickness(geom.half_height, ny, t_min);
  }
  return build_graded_mesh(geom, nx, ny, Grading::geometric(q));
}

std::string mesh_to_json(const Mesh& mesh) {
  nlohmann::json j;
  j["shape"] = mesh.is_triangular() ? "triangle" : "rectangle";
  j["geometry"] = {{"length", mesh.geometry.length}, {"half_height", mesh.geometry.half_height}};
  std::vector<double> xs, ys;
  for (const Vec2& v : mesh.vertices) {
    xs.push_back(v.x());
    ys.push_back(v.y());
  }
  j["vertices"] = {{"x", xs}, {"y", ys}};
  nlohmann::json conn = nlohmann::json::array();
  nlohmann::json sub = nlohmann::json::array();
  for (const Element& el : mesh.elements) {
    std::vector<int> ids(el.v.begin(), el.v.begin() + el.vertex_count());
    conn.push_back(ids);
    sub.push_back(el.subdomain == Subdomain::Upper ? "upper" : "lower");
  }
  j["elements"] = conn;
  j["subdomain"] = sub;
  j["grid_x"] = mesh.grid_x;
  j["grid_y"] = mesh.grid_y;
  return j.dump(2);
}

Mesh mesh_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  DomainGeometry geom;
  geom.length = j.at("geometry").at("length").get<double>();
  geom.half_height = j.at("geometry").at("half_height").get<double>();
  const auto gx = j.at("grid_x").get<std::vector<double>>();
  const auto gy = j.at("grid_y").get<std::vector<double>>();
  Mesh m = build_tensor_mesh(geom, gx, gy);
  if (j.at("shape").get<std::string>() == "triangle") m = split_to_triangles(m);

  // The grid determines everything else; cross-check the payload.
  if (j.at("elements").size() != m.elements.size())
    throw std::runtime_error("mesh json: element count does not match the grid");
  if (j.at("vertices").at("x").size() != m.vertices.size())
    throw std::runtime_error("mesh json: vertex count does not match the grid");
  m.validate();
  return m;
}

}  // namespace karst
