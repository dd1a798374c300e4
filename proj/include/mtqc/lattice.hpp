#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// Geometry of the simulated cluster lattice: a cuboid of (d-1) x (d-1) x T
// primal unit cells whose face qubits carry the correctable errors. Only the
// primal sector is materialized; dual cells are never needed because only
// x-spanning (primal) logical errors are tracked.
//
// Coordinate convention (doubled integer coordinates, no half-integers):
//   - a cell centre has all three coordinates odd:
//       (2i+1, 2j+1, 2k+1), 0 <= i,j < d-1, 0 <= k < T
//   - a face qubit has exactly one even coordinate, the axis normal to it.
// Boundary classification:
//   - x and t boundaries are primal: the boundary faces exist (x = 0 and
//     x = 2(d-1); t = 0 and t = 2T). Faces on the two t boundaries are tagged
//     perfect and are exempt from noise. Faces on the two x boundaries belong
//     to a single cell and terminate error chains.
//   - y boundaries are dual: no face qubits exist at y = 0 or y = 2(d-1), so
//     the outermost cell layers in y have only five faces (checks cut in
//     half).

namespace mtqc {

struct LatticeConfig {
  int d = 3;  // code distance, odd and >= 3
  int T = 13; // simulating-time extent in cells, default 4d+1

  static LatticeConfig with_default_time(int d) { return LatticeConfig{d, 4 * d + 1}; }

  void validate() const {
    if (d < 3 || d % 2 == 0)
      throw std::invalid_argument("code distance must be odd and >= 3");
    if (T < 1) throw std::invalid_argument("time extent must be >= 1");
  }
};

enum class Axis : std::uint8_t { x = 0, y = 1, t = 2 };

struct Qubit {
  std::int16_t x, y, t;  // doubled coordinates
  Axis normal;           // axis with the even coordinate
  // Incident primal cells: cell[0] on the -normal side, cell[1] on the
  // +normal side; -1 when that side is outside the volume.
  std::array<std::int32_t, 2> cell;
  bool time_boundary;  // face at t = 0 or t = 2T; perfect, exempt from noise
  bool x_low, x_high;  // face on the x = 0 / x = 2(d-1) boundary
};

struct Cell {
  std::int16_t x, y, t;              // doubled coordinates, all odd
  std::array<std::int32_t, 6> face;  // qubit ids in order -x,+x,-y,+y,-t,+t; -1 if absent
  int num_faces;                     // 5 on the two y-boundary layers, else 6
};

class RhgLattice {
 public:
  explicit RhgLattice(LatticeConfig cfg) : cfg_(cfg) {
    cfg.validate();
    D_ = cfg.d - 1;
    T_ = cfg.T;
    const int nx = 2 * D_ + 1, ny = 2 * D_ + 1, nt = 2 * T_ + 1;
    id_at_.assign(static_cast<std::size_t>(nx) * ny * nt, -1);

    // Qubits in lexicographic (x, y, t) order over positions with exactly one
    // even coordinate; the order is part of the stable indexing contract.
    for (int x = 0; x < nx; ++x)
      for (int y = 0; y < ny; ++y)
        for (int t = 0; t < nt; ++t) {
          int even = (x % 2 == 0) + (y % 2 == 0) + (t % 2 == 0);
          if (even != 1) continue;
          Axis normal = (x % 2 == 0) ? Axis::x : (y % 2 == 0) ? Axis::y : Axis::t;
          if (normal == Axis::y && (y == 0 || y == 2 * D_)) continue;  // dual boundary
          Qubit q{};
          q.x = static_cast<std::int16_t>(x);
          q.y = static_cast<std::int16_t>(y);
          q.t = static_cast<std::int16_t>(t);
          q.normal = normal;
          q.time_boundary = normal == Axis::t && (t == 0 || t == 2 * T_);
          q.x_low = normal == Axis::x && x == 0;
          q.x_high = normal == Axis::x && x == 2 * D_;
          q.cell = {-1, -1};
          id_at_[flat(x, y, t)] = static_cast<std::int32_t>(qubits_.size());
          qubits_.push_back(q);
        }

    cells_.resize(static_cast<std::size_t>(D_) * D_ * T_);
    for (int k = 0; k < T_; ++k)
      for (int j = 0; j < D_; ++j)
        for (int i = 0; i < D_; ++i) {
          int id = cell_index(i, j, k);
          Cell c{};
          c.x = static_cast<std::int16_t>(2 * i + 1);
          c.y = static_cast<std::int16_t>(2 * j + 1);
          c.t = static_cast<std::int16_t>(2 * k + 1);
          const int offs[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0},
                                  {0, 1, 0},  {0, 0, -1}, {0, 0, 1}};
          c.num_faces = 0;
          for (int f = 0; f < 6; ++f) {
            int qx = c.x + offs[f][0], qy = c.y + offs[f][1], qt = c.t + offs[f][2];
            std::int32_t qid = qubit_at(qx, qy, qt);
            c.face[f] = qid;
            if (qid >= 0) {
              ++c.num_faces;
              // side 0 = cell on the -normal side of the face
              qubits_[qid].cell[f % 2 == 0 ? 1 : 0] = id;
            }
          }
          cells_[id] = c;
        }
  }

  const LatticeConfig& config() const { return cfg_; }
  int d() const { return cfg_.d; }
  int T() const { return T_; }
  int cells_per_axis() const { return D_; }  // d - 1

  const std::vector<Qubit>& qubits() const { return qubits_; }
  const std::vector<Cell>& cells() const { return cells_; }
  int num_qubits() const { return static_cast<int>(qubits_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }

  int cell_index(int i, int j, int k) const { return (k * D_ + j) * D_ + i; }

  // Qubit id at doubled coordinates, or -1 when no face exists there.
  std::int32_t qubit_at(int x, int y, int t) const {
    if (x < 0 || y < 0 || t < 0 || x > 2 * D_ || y > 2 * D_ || t > 2 * T_) return -1;
    return id_at_[flat(x, y, t)];
  }

  // Checks whose support was truncated by the dual y-boundaries.
  int num_truncated_checks() const {
    int n = 0;
    for (const Cell& c : cells_)
      if (c.num_faces == 5) ++n;
    return n;
  }

  // Line-oriented debug dump with stable ordering; one qubit or cell per line.
  std::string dump() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < qubits_.size(); ++i) {
      const Qubit& q = qubits_[i];
      out << "qubit " << i << ' ' << q.x << ' ' << q.y << ' ' << q.t << " normal "
          << "xyt"[static_cast<int>(q.normal)] << " cells " << q.cell[0] << ' '
          << q.cell[1];
      if (q.time_boundary) out << " perfect";
      if (q.x_low) out << " x_low";
      if (q.x_high) out << " x_high";
      out << '\n';
    }
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      const Cell& c = cells_[i];
      out << "cell " << i << ' ' << c.x << ' ' << c.y << ' ' << c.t << " faces";
      for (std::int32_t f : c.face) out << ' ' << f;
      out << '\n';
    }
    return out.str();
  }

 private:
  std::size_t flat(int x, int y, int t) const {
    return (static_cast<std::size_t>(x) * (2 * D_ + 1) + y) * (2 * T_ + 1) + t;
  }

  LatticeConfig cfg_;
  int D_ = 0, T_ = 0;
  std::vector<Qubit> qubits_;
  std::vector<Cell> cells_;
  std::vector<std::int32_t> id_at_;
};

inline RhgLattice build_lattice(LatticeConfig cfg) { return RhgLattice(cfg); }

// Number of lattice qubits consumed by one logical gate simulated on a block
// of 6 l^3 cluster qubits with l = 5d/4; evaluated in integer rationals
// (375 d^3 / 32) and reported as a real number.
inline double count_lattice_qubits_for_gate(int d) {
  if (d < 0) throw std::domain_error("d must be >= 0");
  long long cubed = static_cast<long long>(d) * d * d;
  return static_cast<double>(375 * cubed) / 32.0;
}

}  // namespace mtqc
