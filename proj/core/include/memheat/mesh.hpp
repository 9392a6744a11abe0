#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace memheat {

/// Uniform tensor grid on [0, L_x] (x [0, L_y]) with homogeneous Dirichlet
/// boundary. Only interior nodes carry unknowns.
struct Mesh {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> cells{1, 1};
  std::array<double, 2> h{1.0, 1.0};

  int interior(int axis) const { return axis < dim ? cells[axis] - 1 : 1; }
  std::size_t node_count() const {
    return static_cast<std::size_t>(interior(0)) * static_cast<std::size_t>(interior(1));
  }
  /// Edges between consecutive nodes along each axis, boundary nodes included.
  std::size_t x_edge_count() const {
    return static_cast<std::size_t>(interior(0) + 1) * static_cast<std::size_t>(interior(1));
  }
  std::size_t y_edge_count() const {
    return dim == 2 ? static_cast<std::size_t>(interior(0)) * static_cast<std::size_t>(interior(1) + 1)
                    : 0;
  }
  std::size_t edge_count() const { return x_edge_count() + y_edge_count(); }
  double cell_volume() const { return dim == 2 ? h[0] * h[1] : h[0]; }
  /// Coordinate of interior node index i along an axis.
  double coord(int axis, int i) const { return (i + 1) * h[axis]; }

  bool operator==(const Mesh&) const = default;
};

/// Throws TooCoarse when cells < 4 and InvalidParameter for extent <= 0 or dim
/// outside {1, 2}.
Mesh build_mesh(int dim, double extent, int cells);
Mesh build_mesh(int dim, std::array<double, 2> extent, std::array<int, 2> cells);

/// Vector-valued grid function, node-major: values[node * components + c].
/// Boundary values are zero by construction and are not stored.
struct Field {
  Mesh mesh;
  int components = 1;
  std::vector<double> values;

  Field() = default;
  Field(const Mesh& m, int nc);

  std::size_t nodes() const { return mesh.node_count(); }
  double& at(std::size_t node, int c) { return values[node * components + c]; }
  double at(std::size_t node, int c) const { return values[node * components + c]; }

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

void require_same_shape(const Field& a, const Field& b);

/// Five-point (three-point in 1D) central-difference Laplacian per component
/// with zero ghost values.
Field apply_laplacian(const Field& field);
void apply_laplacian(const Mesh& mesh, int components, std::span<const double> in,
                     std::span<double> out);

/// Forward differences (u_right - u_left) / h on every grid edge, boundary
/// edges included. Layout: x-edges then y-edges, each edge-major with the
/// components innermost.
std::vector<double> edge_gradients(const Field& field);
void edge_gradients(const Mesh& mesh, int components, std::span<const double> in,
                    std::span<double> out);

/// Discrete int |grad u|^2 = cell_volume * sum over edges of squared
/// differences. Equals -<Lap_h u, u> exactly (discrete Green identity).
double grad_sq_norm(const Field& field);
double edge_sq_norm(const Mesh& mesh, std::span<const double> edges);

/// Discrete int |v|^m with |.| the Euclidean norm across components. m >= 2.
double l2_norm_pow(const Field& field, double m);

/// Discrete L2 inner product sum_nodes u.v * cell_volume.
double inner(const Field& a, const Field& b);

double max_abs(const Field& field);

/// (G3): 2 <= m, and m <= 2n/(n-2) when n >= 3.
bool g3_admissible(double m, int dim);

struct InitialCondition {
  enum class Kind { Sine, Bump, Random };
  Kind kind = Kind::Sine;
  std::uint64_t seed = 0;

  bool operator==(const InitialCondition&) const = default;
};

/// "sine", "bump" or "random(<seed>)".
InitialCondition parse_initial_condition(const std::string& text);
std::string to_string(const InitialCondition& ic);

/// sine: prod_d sin(pi x_d / L_d) in every component.
/// bump: prod_d 16 (x_d/L_d)^2 (1 - x_d/L_d)^2 in every component.
/// random: i.i.d. uniform(-1, 1) nodal values from a seeded mt19937_64.
Field make_initial_field(const Mesh& mesh, int components, const InitialCondition& ic);

}  // namespace memheat
