#include "pat/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "pat/errors.hpp"

namespace pat::io {

namespace {

static_assert(std::endian::native == std::endian::little, "field files are written in host order");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ConfigError("unexpected end of file");
  return v;
}

void expect_magic(std::istream& is, const char* magic, const std::filesystem::path& path) {
  char m[4];
  is.read(m, 4);
  if (!is || std::memcmp(m, magic, 4) != 0)
    throw ConfigError(path.string() + ": not a " + std::string(magic, 4) + " file");
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read " + path.string());
  return is;
}

}  // namespace

void write_field(const std::filesystem::path& path, const ScalarField2D& f) {
  auto os = open_out(path);
  const Grid2D& g = f.grid();
  os.write("PATF", 4);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.nx));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.ny));
  put<std::uint32_t>(os, 0u);
  put<double>(os, g.dx);
  put<double>(os, g.dy);
  os.write(reinterpret_cast<const char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!os) throw ConfigError("failed writing " + path.string());
}

ScalarField2D read_field(const std::filesystem::path& path, Point origin) {
  auto is = open_in(path);
  expect_magic(is, "PATF", path);
  const auto nx = get<std::uint32_t>(is);
  const auto ny = get<std::uint32_t>(is);
  get<std::uint32_t>(is);
  const double dx = get<double>(is);
  const double dy = get<double>(is);
  ScalarField2D f(Grid2D(static_cast<int>(nx), static_cast<int>(ny), dx, dy, origin.x, origin.y));
  is.read(reinterpret_cast<char*>(f.data()), static_cast<std::streamsize>(f.size() * sizeof(double)));
  if (!is) throw ConfigError(path.string() + ": truncated field data");
  return f;
}

std::filesystem::path sidecar_path(const std::filesystem::path& record_path) {
  return std::filesystem::path(record_path.string() + ".nodes.csv");
}

void write_record(const std::filesystem::path& path, const ObservationRecord& r) {
  {
    auto os = open_out(path);
    os.write("PATR", 4);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(r.n_nodes()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(r.n_steps()));
    put<double>(os, r.dt());
    os.write(reinterpret_cast<const char*>(r.samples().data()),
             static_cast<std::streamsize>(r.samples().size() * sizeof(double)));
    if (!os) throw ConfigError("failed writing " + path.string());
  }
  std::ofstream csv(sidecar_path(path));
  if (!csv) throw ConfigError("cannot write " + sidecar_path(path).string());
  csv << "node,i,j,x,y,weight,lambda\n" << std::setprecision(17);
  for (std::size_t k = 0; k < r.n_nodes(); ++k) {
    const auto& n = r.nodes()[k];
    csv << k << ',' << n.i << ',' << n.j << ',' << n.x << ',' << n.y << ',' << n.weight << ',' << n.lambda << '\n';
  }
}

ObservationRecord read_record(const std::filesystem::path& path) {
  auto is = open_in(path);
  expect_magic(is, "PATR", path);
  const auto n_nodes = get<std::uint32_t>(is);
  const auto n_steps = get<std::uint32_t>(is);
  const double dt = get<double>(is);

  std::vector<BoundaryNode> nodes(n_nodes);
  std::ifstream csv(sidecar_path(path));
  if (csv) {
    std::string line;
    std::getline(csv, line);
    for (std::size_t k = 0; k < n_nodes; ++k) {
      if (!std::getline(csv, line)) throw ConfigError(sidecar_path(path).string() + ": too few node rows");
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      std::size_t idx;
      auto& n = nodes[k];
      ls >> idx >> n.i >> n.j >> n.x >> n.y >> n.weight >> n.lambda;
      if (!ls || idx != k) throw ConfigError(sidecar_path(path).string() + ": malformed row " + std::to_string(k));
    }
  }
  ObservationRecord r(std::move(nodes), dt, n_steps);
  is.read(reinterpret_cast<char*>(r.samples().data()),
          static_cast<std::streamsize>(r.samples().size() * sizeof(double)));
  if (!is) throw ConfigError(path.string() + ": truncated record data");
  return r;
}

void write_pgm(const std::filesystem::path& path, const ScalarField2D& f, double lo, double hi) {
  if (!(hi > lo)) throw ConfigError("PGM window needs hi > lo");
  auto os = open_out(path);
  const Grid2D& g = f.grid();
  os << "P5\n" << g.nx << ' ' << g.ny << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(g.nx));
  for (int j = g.ny - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx; ++i) {
      const double t = std::clamp((f(i, j) - lo) / (hi - lo), 0.0, 1.0);
      row[static_cast<std::size_t>(i)] = static_cast<unsigned char>(std::lround(255.0 * t));
    }
    os.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace pat::io
