#include "memheat/mesh.hpp"

#include "memheat/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace memheat {

Mesh build_mesh(int dim, double extent, int cells) {
  return build_mesh(dim, {extent, extent}, {cells, cells});
}

Mesh build_mesh(int dim, std::array<double, 2> extent, std::array<int, 2> cells) {
  if (dim != 1 && dim != 2) {
    throw Error(ErrorKind::InvalidParameter, "mesh dimension must be 1 or 2");
  }
  Mesh m;
  m.dim = dim;
  for (int axis = 0; axis < dim; ++axis) {
    if (!(extent[axis] > 0.0) || !std::isfinite(extent[axis])) {
      throw Error(ErrorKind::InvalidParameter, "mesh extent must be positive");
    }
    if (cells[axis] < 4) {
      throw Error(ErrorKind::TooCoarse,
                  "need at least 4 cells per axis, got " + std::to_string(cells[axis]));
    }
    m.extent[axis] = extent[axis];
    m.cells[axis] = cells[axis];
    m.h[axis] = extent[axis] / cells[axis];
  }
  if (dim == 1) {
    m.extent[1] = 1.0;
    m.cells[1] = 2;  // interior(1) == 1 is what matters; keep h meaningful
    m.h[1] = 1.0;
  }
  return m;
}

Field::Field(const Mesh& m, int nc) : mesh(m), components(nc) {
  if (nc < 1) throw Error(ErrorKind::InvalidParameter, "field needs >= 1 component");
  values.assign(m.node_count() * static_cast<std::size_t>(nc), 0.0);
}

void require_same_shape(const Field& a, const Field& b) {
  if (!(a.mesh == b.mesh) || a.components != b.components || a.values.size() != b.values.size()) {
    throw Error(ErrorKind::ShapeMismatch, "fields live on different meshes or component counts");
  }
}

Field& Field::operator+=(const Field& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

void apply_laplacian(const Mesh& mesh, int nc, std::span<const double> in, std::span<double> out) {
  const int nx = mesh.interior(0);
  const int ny = mesh.interior(1);
  const double ihx2 = 1.0 / (mesh.h[0] * mesh.h[0]);
  const double ihy2 = 1.0 / (mesh.h[1] * mesh.h[1]);
  const auto idx = [nx, nc](int i, int j, int c) {
    return (static_cast<std::size_t>(j) * nx + i) * nc + c;
  };
  if (mesh.dim == 1 && nc == 1) {
    for (int i = 0; i < nx; ++i) {
      const double left = i > 0 ? in[i - 1] : 0.0;
      const double right = i + 1 < nx ? in[i + 1] : 0.0;
      out[i] = (left - 2.0 * in[i] + right) * ihx2;
    }
    return;
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      for (int c = 0; c < nc; ++c) {
        const double u = in[idx(i, j, c)];
        const double l = i > 0 ? in[idx(i - 1, j, c)] : 0.0;
        const double r = i + 1 < nx ? in[idx(i + 1, j, c)] : 0.0;
        double lap = (l - 2.0 * u + r) * ihx2;
        if (mesh.dim == 2) {
          const double d = j > 0 ? in[idx(i, j - 1, c)] : 0.0;
          const double t = j + 1 < ny ? in[idx(i, j + 1, c)] : 0.0;
          lap += (d - 2.0 * u + t) * ihy2;
        }
        out[idx(i, j, c)] = lap;
      }
    }
  }
}

Field apply_laplacian(const Field& field) {
  Field out(field.mesh, field.components);
  apply_laplacian(field.mesh, field.components, field.values, out.values);
  return out;
}

void edge_gradients(const Mesh& mesh, int nc, std::span<const double> in, std::span<double> out) {
  const int nx = mesh.interior(0);
  const int ny = mesh.interior(1);
  const double ihx = 1.0 / mesh.h[0];
  const double ihy = 1.0 / mesh.h[1];
  const auto node = [&](int i, int j, int c) -> double {
    if (i < 0 || i >= nx || j < 0 || j >= ny) return 0.0;
    return in[(static_cast<std::size_t>(j) * nx + i) * nc + c];
  };
  std::size_t e = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      for (int c = 0; c < nc; ++c) out[e++] = (node(i, j, c) - node(i - 1, j, c)) * ihx;
    }
  }
  if (mesh.dim == 2) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (int c = 0; c < nc; ++c) out[e++] = (node(i, j, c) - node(i, j - 1, c)) * ihy;
      }
    }
  }
}

std::vector<double> edge_gradients(const Field& field) {
  std::vector<double> out(field.mesh.edge_count() * static_cast<std::size_t>(field.components));
  edge_gradients(field.mesh, field.components, field.values, out);
  return out;
}

double edge_sq_norm(const Mesh& mesh, std::span<const double> edges) {
  double s = 0.0;
  for (double v : edges) s += v * v;
  return s * mesh.cell_volume();
}

double grad_sq_norm(const Field& field) {
  const auto edges = edge_gradients(field);
  return edge_sq_norm(field.mesh, edges);
}

double l2_norm_pow(const Field& field, double m) {
  if (!(m >= 2.0)) {
    throw Error(ErrorKind::HypothesisG3, "exponent m must be >= 2, got " + std::to_string(m));
  }
  const int nc = field.components;
  double s = 0.0;
  for (std::size_t n = 0; n < field.nodes(); ++n) {
    double sq = 0.0;
    for (int c = 0; c < nc; ++c) sq += field.at(n, c) * field.at(n, c);
    s += m == 2.0 ? sq : std::pow(sq, 0.5 * m);
  }
  return s * field.mesh.cell_volume();
}

double inner(const Field& a, const Field& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s * a.mesh.cell_volume();
}

double max_abs(const Field& field) {
  double m = 0.0;
  for (double v : field.values) m = std::max(m, std::abs(v));
  return m;
}

bool g3_admissible(double m, int dim) {
  if (!(m >= 2.0)) return false;
  if (dim >= 3) return m <= 2.0 * dim / (dim - 2.0);
  return true;
}

InitialCondition parse_initial_condition(const std::string& text) {
  if (text == "sine") return {InitialCondition::Kind::Sine, 0};
  if (text == "bump") return {InitialCondition::Kind::Bump, 0};
  if (text.rfind("random(", 0) == 0 && text.size() > 8 && text.back() == ')') {
    const std::string inner_text = text.substr(7, text.size() - 8);
    std::size_t used = 0;
    unsigned long long seed = 0;
    try {
      seed = std::stoull(inner_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == inner_text.size() && !inner_text.empty()) {
      return {InitialCondition::Kind::Random, static_cast<std::uint64_t>(seed)};
    }
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown initial condition '" + text + "'");
}

std::string to_string(const InitialCondition& ic) {
  switch (ic.kind) {
    case InitialCondition::Kind::Sine: return "sine";
    case InitialCondition::Kind::Bump: return "bump";
    case InitialCondition::Kind::Random: return "random(" + std::to_string(ic.seed) + ")";
  }
  return "sine";
}

Field make_initial_field(const Mesh& mesh, int nc, const InitialCondition& ic) {
  Field u(mesh, nc);
  const int nx = mesh.interior(0);
  const int ny = mesh.interior(1);
  std::mt19937_64 rng(ic.seed);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t n = static_cast<std::size_t>(j) * nx + i;
      double shape = 1.0;
      for (int axis = 0; axis < mesh.dim; ++axis) {
        const double s = mesh.coord(axis, axis == 0 ? i : j) / mesh.extent[axis];
        switch (ic.kind) {
          case InitialCondition::Kind::Sine: shape *= std::sin(std::numbers::pi * s); break;
          case InitialCondition::Kind::Bump: shape *= 16.0 * s * s * (1.0 - s) * (1.0 - s); break;
          case InitialCondition::Kind::Random: break;
        }
      }
      for (int c = 0; c < nc; ++c) {
        if (ic.kind == InitialCondition::Kind::Random) {
          // 53-bit mantissa from the raw engine output keeps this portable.
          const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          u.at(n, c) = 2.0 * unit - 1.0;
        } else {
          u.at(n, c) = shape;
        }
      }
    }
  }
  return u;
}

}  // namespace memheat
