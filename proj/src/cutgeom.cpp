#include "cutstokes/cutgeom.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <ostream>

namespace cutstokes {

std::vector<Vec3> ConvexPolyhedron::face_points(const Face& face) const {
  std::vector<Vec3> pts;
  pts.reserve(face.loop.size());
  for (int v : face.loop) pts.push_back(vertices[v]);
  return pts;
}

ConvexPolyhedron ConvexPolyhedron::from_tetrahedron(const Tetrahedron& tet) {
  ConvexPolyhedron p;
  p.vertices.assign(tet.begin(), tet.end());
  const bool positive = signed_volume(tet) > 0.0;
  for (int k = 0; k < 4; ++k) {
    auto lf = local_face(k);
    if (!positive) std::swap(lf[1], lf[2]);
    p.faces.push_back({{lf[0], lf[1], lf[2]}, kOriginalFace});
  }
  return p;
}

ConvexPolyhedron ConvexPolyhedron::from_box(const Vec3& lo, const Vec3& hi) {
  ConvexPolyhedron p;
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      for (int i = 0; i < 2; ++i) {
        p.vertices.emplace_back(i ? hi.x() : lo.x(), j ? hi.y() : lo.y(), k ? hi.z() : lo.z());
      }
    }
  }
  // vertex id = i + 2j + 4k
  p.faces = {
      {{0, 4, 6, 2}, kOriginalFace},  // x = lo
      {{1, 3, 7, 5}, kOriginalFace},  // x = hi
      {{0, 1, 5, 4}, kOriginalFace},  // y = lo
      {{2, 6, 7, 3}, kOriginalFace},  // y = hi
      {{0, 2, 3, 1}, kOriginalFace},  // z = lo
      {{4, 5, 7, 6}, kOriginalFace},  // z = hi
  };
  return p;
}

Vec3 polygon_vector_area(std::span<const Vec3> loop) {
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
    sum += (loop[i] - loop[0]).cross(loop[i + 1] - loop[0]);
  }
  return 0.5 * sum;
}

double polygon_area(std::span<const Vec3> loop) { return polygon_vector_area(loop).norm(); }

double polyhedron_volume(const ConvexPolyhedron& poly) {
  if (poly.empty()) return 0.0;
  Vec3 ref = Vec3::Zero();
  for (const auto& v : poly.vertices) ref += v;
  ref /= static_cast<double>(poly.vertices.size());
  double vol = 0.0;
  for (const auto& face : poly.faces) {
    const Vec3 a = poly.vertices[face.loop[0]] - ref;
    for (std::size_t i = 1; i + 1 < face.loop.size(); ++i) {
      const Vec3 b = poly.vertices[face.loop[i]] - ref;
      const Vec3 c = poly.vertices[face.loop[i + 1]] - ref;
      vol += a.dot(b.cross(c));
    }
  }
  return vol / 6.0;
}

double polyhedron_surface_area(const ConvexPolyhedron& poly) {
  double area = 0.0;
  for (const auto& face : poly.faces) area += polygon_area(poly.face_points(face));
  return area;
}

ConvexPolyhedron clip(const ConvexPolyhedron& poly, const Halfspace& h, int tag, double snap_tol) {
  if (poly.empty()) return {};
  const int n = static_cast<int>(poly.vertices.size());
  std::vector<Vec3> verts = poly.vertices;
  std::vector<double> dist(n);
  bool any_out = false;
  bool any_in = false;
  for (int i = 0; i < n; ++i) {
    double d = h.signed_distance(verts[i]);
    if (d != 0.0 && std::abs(d) <= snap_tol) {
      verts[i] -= d * h.normal;
      d = 0.0;
    }
    dist[i] = d;
    any_out = any_out || d > 0.0;
    any_in = any_in || d < 0.0;
  }
  if (!any_in) return {};
  if (!any_out) {
    ConvexPolyhedron out{verts, poly.faces};
    for (auto& face : out.faces) {
      const bool on_plane =
          std::all_of(face.loop.begin(), face.loop.end(), [&](int v) { return dist[v] == 0.0; });
      if (on_plane) face.tag = tag;
    }
    return out;
  }

  ConvexPolyhedron out;
  std::vector<int> kept(n, -1);
  for (int i = 0; i < n; ++i) {
    if (dist[i] <= 0.0) {
      kept[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(verts[i]);
    }
  }
  std::vector<int> on_plane;
  for (int i = 0; i < n; ++i) {
    if (dist[i] == 0.0) on_plane.push_back(kept[i]);
  }
  std::map<std::pair<int, int>, int> edge_points;
  auto crossing = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = edge_points.find(key);
    if (it != edge_points.end()) return it->second;
    const int lo = key.first;
    const int hi = key.second;
    const double t = dist[lo] / (dist[lo] - dist[hi]);
    const int id = static_cast<int>(out.vertices.size());
    out.vertices.push_back(verts[lo] + t * (verts[hi] - verts[lo]));
    edge_points.emplace(key, id);
    on_plane.push_back(id);
    return id;
  };

  for (const auto& face : poly.faces) {
    ConvexPolyhedron::Face clipped{{}, face.tag};
    const std::size_t m = face.loop.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int a = face.loop[k];
      const int b = face.loop[(k + 1) % m];
      if (dist[a] <= 0.0) clipped.loop.push_back(kept[a]);
      if ((dist[a] < 0.0 && dist[b] > 0.0) || (dist[a] > 0.0 && dist[b] < 0.0)) {
        clipped.loop.push_back(crossing(a, b));
      }
    }
    if (clipped.loop.size() >= 3) out.faces.push_back(std::move(clipped));
  }

  std::sort(on_plane.begin(), on_plane.end());
  on_plane.erase(std::unique(on_plane.begin(), on_plane.end()), on_plane.end());
  if (on_plane.size() >= 3) {
    Vec3 centre = Vec3::Zero();
    for (int v : on_plane) centre += out.vertices[v];
    centre /= static_cast<double>(on_plane.size());
    const Vec3 e1 = h.normal.unitOrthogonal();
    const Vec3 e2 = h.normal.cross(e1);
    std::vector<std::pair<double, int>> angles;
    for (int v : on_plane) {
      const Vec3 r = out.vertices[v] - centre;
      angles.emplace_back(std::atan2(r.dot(e2), r.dot(e1)), v);
    }
    std::sort(angles.begin(), angles.end());
    ConvexPolyhedron::Face cap{{}, tag};
    for (const auto& [angle, v] : angles) cap.loop.push_back(v);
    // counter-clockwise about e1 x e2 = normal, i.e. outward
    out.faces.push_back(std::move(cap));
  }
  if (out.faces.size() < 4) return {};
  return out;
}

ConvexPolyhedron clip_tetrahedron(const Tetrahedron& tet, const PolytopeDomain& domain) {
  double diameter = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) diameter = std::max(diameter, (tet[a] - tet[b]).norm());
  }
  const double snap = kGeomTolerance * diameter;
  ConvexPolyhedron poly = ConvexPolyhedron::from_tetrahedron(tet);
  for (int i = 0; i < domain.size() && !poly.empty(); ++i) {
    poly = clip(poly, domain.halfspaces()[i], i, snap);
  }
  return poly;
}

std::vector<ConvexPolyhedron> clip_tetrahedron_complement(const Tetrahedron& tet,
                                                          const PolytopeDomain& domain) {
  double diameter = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) diameter = std::max(diameter, (tet[a] - tet[b]).norm());
  }
  const double snap = kGeomTolerance * diameter;
  std::vector<ConvexPolyhedron> pieces;
  ConvexPolyhedron remaining = ConvexPolyhedron::from_tetrahedron(tet);
  for (int i = 0; i < domain.size() && !remaining.empty(); ++i) {
    const Halfspace& h = domain.halfspaces()[i];
    const Halfspace flipped{-h.normal, -h.offset};
    ConvexPolyhedron outside = clip(remaining, flipped, i, snap);
    if (!outside.empty()) pieces.push_back(std::move(outside));
    remaining = clip(remaining, h, i, snap);
  }
  return pieces;
}

QuadratureRule polyhedron_rule(const ConvexPolyhedron& poly, int degree) {
  QuadratureRule rule;
  if (poly.empty()) return rule;
  Vec3 centre = Vec3::Zero();
  for (const auto& v : poly.vertices) centre += v;
  centre /= static_cast<double>(poly.vertices.size());
  for (const auto& face : poly.faces) {
    const Vec3& a = poly.vertices[face.loop[0]];
    for (std::size_t i = 1; i + 1 < face.loop.size(); ++i) {
      const Tetrahedron t = {centre, a, poly.vertices[face.loop[i]], poly.vertices[face.loop[i + 1]]};
      rule.append(tetrahedron_rule(t, degree));
    }
  }
  return rule;
}

QuadratureRule polygon_rule(std::span<const Vec3> loop, const Vec3& normal, int degree) {
  QuadratureRule rule;
  for (std::size_t i = 1; i + 1 < loop.size(); ++i) {
    rule.append(triangle_rule({loop[0], loop[i], loop[i + 1]}, degree));
  }
  rule.normal = normal;
  return rule;
}

PolytopeDomain::PolytopeDomain(std::vector<Halfspace> halfspaces) : halfspaces_(std::move(halfspaces)) {
  if (halfspaces_.size() < 4) {
    throw StructuralError("PolytopeDomain: a bounded polytope needs at least four half-spaces");
  }
  for (auto& h : halfspaces_) {
    const double len = h.normal.norm();
    if (!(len > 0.0) || !std::isfinite(len) || !std::isfinite(h.offset)) {
      throw StructuralError("PolytopeDomain: invalid half-space");
    }
    if (len != 1.0) {
      h.normal /= len;
      h.offset /= len;
    }
  }

  // Vertex enumeration over all plane triples.
  const int m = size();
  double scale = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      for (int c = b + 1; c < m; ++c) {
        Mat3 mat;
        mat.row(0) = halfspaces_[a].normal;
        mat.row(1) = halfspaces_[b].normal;
        mat.row(2) = halfspaces_[c].normal;
        if (std::abs(mat.determinant()) < 1e-12) continue;
        const Vec3 x = mat.partialPivLu().solve(
            Vec3(halfspaces_[a].offset, halfspaces_[b].offset, halfspaces_[c].offset));
        scale = std::max(scale, x.cwiseAbs().maxCoeff());
        if (contains(x, 1e-10 * (1.0 + x.norm()))) vertices_.push_back(x);
      }
    }
  }
  if (vertices_.size() < 4) {
    throw StructuralError("PolytopeDomain: half-spaces do not bound a non-empty polytope");
  }
  // A bounded polytope survives clipping of a much larger box with no box
  // face left over.
  const double big = 10.0 * (scale + 1.0);
  ConvexPolyhedron poly = ConvexPolyhedron::from_box(Vec3::Constant(-big), Vec3::Constant(big));
  for (int i = 0; i < m && !poly.empty(); ++i) poly = clip(poly, halfspaces_[i], i, 0.0);
  if (poly.empty()) throw StructuralError("PolytopeDomain: empty polytope");
  for (const auto& face : poly.faces) {
    if (face.tag == kOriginalFace) throw StructuralError("PolytopeDomain: unbounded domain");
  }
  polyhedron_ = std::move(poly);
  volume_ = polyhedron_volume(polyhedron_);
  surface_area_ = polyhedron_surface_area(polyhedron_);
  if (!(volume_ > 0.0)) throw StructuralError("PolytopeDomain: polytope has no interior");
}

PolytopeDomain PolytopeDomain::box(const Vec3& lo, const Vec3& hi) {
  std::vector<Halfspace> hs;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = 1.0;
    hs.push_back({-e, -lo[i]});
    hs.push_back({e, hi[i]});
  }
  return PolytopeDomain(std::move(hs));
}

bool PolytopeDomain::contains(const Vec3& x, double tol) const {
  return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                     [&](const Halfspace& h) { return h.signed_distance(x) <= tol; });
}

PolytopeDomain PolytopeDomain::translated(const Vec3& shift) const {
  std::vector<Halfspace> hs = halfspaces_;
  for (auto& h : hs) h.offset += h.normal.dot(shift);
  return PolytopeDomain(std::move(hs));
}

bool CutDecomposition::is_active_interior_facet(const BackgroundMesh& mesh, int f) const {
  const auto [plus, minus] = mesh.facet_cells[f];
  return minus != kNoCell && is_active(plus) && is_active(minus);
}

double CutDecomposition::total_volume() const {
  double sum = 0.0;
  for (int c : active_cells) sum += volume_rules[c].total_weight();
  return sum;
}

double CutDecomposition::total_surface_area() const {
  double sum = 0.0;
  for (int c : active_cells) {
    for (const auto& r : surface_rules[c]) sum += r.total_weight();
  }
  return sum;
}

Vec3 CutDecomposition::total_vector_area() const {
  Vec3 sum = Vec3::Zero();
  for (int c : active_cells) {
    for (const auto& r : surface_rules[c]) sum += r.total_weight() * *r.normal;
  }
  return sum;
}

namespace {

// Active set, zones and the G3 walk, once classification is known.
void finish_decomposition(const BackgroundMesh& mesh, CutDecomposition& d) {
  const int nc = mesh.num_cells();
  d.active_index.assign(nc, -1);
  for (int c = 0; c < nc; ++c) {
    if (d.classification[c] != CellKind::Outside) {
      d.active_index[c] = static_cast<int>(d.active_cells.size());
      d.active_cells.push_back(c);
    }
    if (d.classification[c] == CellKind::Cut) d.boundary_zone_cells.push_back(c);
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!d.is_active_interior_facet(mesh, f)) continue;
    const auto [plus, minus] = mesh.facet_cells[f];
    if (d.classification[plus] == CellKind::Cut || d.classification[minus] == CellKind::Cut) {
      d.boundary_zone_facets.push_back(f);
    }
  }

  // Breadth-first walk from uncut active cells.
  std::vector<int> steps(nc, -1);
  std::deque<int> queue;
  for (int c : d.active_cells) {
    if (d.classification[c] == CellKind::Inside) {
      steps[c] = 0;
      queue.push_back(c);
    }
  }
  while (!queue.empty()) {
    const int c = queue.front();
    queue.pop_front();
    for (int f : mesh.cell_facets[c]) {
      if (!d.is_active_interior_facet(mesh, f)) continue;
      const auto [plus, minus] = mesh.facet_cells[f];
      const int other = plus == c ? minus : plus;
      if (steps[other] < 0) {
        steps[other] = steps[c] + 1;
        queue.push_back(other);
      }
    }
  }
  d.g3 = {};
  for (int c : d.boundary_zone_cells) {
    if (steps[c] < 0) {
      ++d.g3.unreachable_cut_cells;
    } else {
      d.g3.max_steps = std::max(d.g3.max_steps, steps[c]);
    }
  }
  d.g3.satisfied = d.g3.unreachable_cut_cells == 0;
}

}  // namespace

CutDecomposition classify_and_decompose(const BackgroundMesh& mesh, const PolytopeDomain& domain,
                                        int volume_degree, int surface_degree) {
  const int nc = mesh.num_cells();
  CutDecomposition d;
  d.volume_degree = volume_degree;
  d.surface_degree = surface_degree;
  d.classification.resize(nc);
  d.cut_volume.assign(nc, 0.0);
  d.volume_rules.resize(nc);
  d.surface_rules.resize(nc);

  for (int c = 0; c < nc; ++c) {
    const Tetrahedron tet = mesh.cell_vertices(c);
    const double vol = tetrahedron_volume(tet);
    const ConvexPolyhedron poly = clip_tetrahedron(tet, domain);
    const double inside = polyhedron_volume(poly);
    if (poly.empty() || inside <= 0.0) {
      d.classification[c] = CellKind::Outside;
      continue;
    }
    if (vol - inside <= kGeomTolerance * vol) {
      d.classification[c] = CellKind::Inside;
      d.cut_volume[c] = vol;
      d.volume_rules[c] = tetrahedron_rule(tet, volume_degree);
    } else {
      d.classification[c] = CellKind::Cut;
      d.cut_volume[c] = inside;
      d.volume_rules[c] = polyhedron_rule(poly, volume_degree);
    }
    for (const auto& face : poly.faces) {
      if (face.tag == kOriginalFace) continue;
      const auto pts = poly.face_points(face);
      if (polygon_area(pts) == 0.0) continue;
      d.surface_rules[c].push_back(polygon_rule(pts, domain.halfspaces()[face.tag].normal, surface_degree));
    }
  }
  finish_decomposition(mesh, d);
  return d;
}

CutDecomposition boundary_fitted_decomposition(const BackgroundMesh& mesh, int volume_degree,
                                               int surface_degree) {
  const int nc = mesh.num_cells();
  CutDecomposition d;
  d.volume_degree = volume_degree;
  d.surface_degree = surface_degree;
  d.classification.assign(nc, CellKind::Inside);
  d.cut_volume.resize(nc);
  d.volume_rules.resize(nc);
  d.surface_rules.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const Tetrahedron tet = mesh.cell_vertices(c);
    d.cut_volume[c] = tetrahedron_volume(tet);
    d.volume_rules[c] = tetrahedron_rule(tet, volume_degree);
    const ConvexPolyhedron poly = ConvexPolyhedron::from_tetrahedron(tet);
    for (int k = 0; k < 4; ++k) {
      if (mesh.is_interior_facet(mesh.cell_facets[c][k])) continue;
      const auto pts = poly.face_points(poly.faces[k]);
      const Vec3 normal = (pts[1] - pts[0]).cross(pts[2] - pts[0]).normalized();
      d.surface_rules[c].push_back(polygon_rule(pts, normal, surface_degree));
    }
  }
  finish_decomposition(mesh, d);
  return d;
}

void write_cut_geometry_text(const BackgroundMesh& mesh, const PolytopeDomain& domain,
                             const CutDecomposition& decomposition, std::ostream& out) {
  const auto old_precision = out.precision(17);
  for (int c : decomposition.boundary_zone_cells) {
    const ConvexPolyhedron poly = clip_tetrahedron(mesh.cell_vertices(c), domain);
    out << "cell " << c << " faces " << poly.faces.size() << '\n';
    for (const auto& face : poly.faces) {
      out << "face " << face.tag << ' ' << face.loop.size() << '\n';
      for (int v : face.loop) {
        const Vec3& x = poly.vertices[v];
        out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
      }
    }
  }
  out.precision(old_precision);
}

}  // namespace cutstokes
