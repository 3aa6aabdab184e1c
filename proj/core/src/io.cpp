#include "eikograph/io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "eikograph/harness.hpp"
#include "eikograph/version.hpp"

namespace eikograph {

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::string header_comment(const std::string& config_hash) {
  return std::string("# eikograph ") + kVersion + " " + config_hash + "\n";
}

}  // namespace

void save_cloud(const PointCloud& cloud, const std::string& csv_path,
                const std::string& sidecar_path, const std::string& config_hash) {
  auto out = open_out(csv_path);
  out << header_comment(config_hash);
  for (int k = 0; k < cloud.dim; ++k) out << (k ? "," : "") << 'x' << k;
  out << '\n';
  for (std::size_t i = 0; i < cloud.n; ++i) {
    const auto p = cloud.point(i);
    for (int k = 0; k < cloud.dim; ++k)
      out << (k ? "," : "") << format_double(p[k]);
    out << '\n';
  }

  nlohmann::json meta;
  meta["eikograph"] = kVersion;
  meta["config_hash"] = config_hash;
  meta["kind"] = cloud.spec.kind_name();
  meta["intrinsic_dim"] = cloud.spec.intrinsic_dim;
  meta["embedding_dim"] = cloud.spec.embedding_dim;
  switch (cloud.spec.kind) {
    case ManifoldKind::Sphere:
      meta["radius"] = cloud.spec.radius;
      break;
    case ManifoldKind::FlatTorus:
      meta["periods"] = cloud.spec.periods;
      break;
    case ManifoldKind::Box:
      meta["lower"] = cloud.spec.lower;
      meta["upper"] = cloud.spec.upper;
      break;
  }
  meta["n"] = cloud.n;
  meta["seed"] = cloud.seed;
  meta["density"] = {{"id", cloud.density_id},
                     {"params", cloud.density_params},
                     {"acceptance_rate", cloud.acceptance_rate}};
  auto sidecar = open_out(sidecar_path);
  sidecar << meta.dump(2) << '\n';
}

void save_graph(const Graph& graph, const std::string& edges_path,
                const std::string& vertices_path, const std::string& config_hash) {
  auto edges = open_out(edges_path);
  edges << header_comment(config_hash);
  edges << "i,j,dtilde,weight\n";
  for (std::size_t i = 0; i < graph.n(); ++i)
    for (const auto& e : graph.neighbors[i])
      if (e.target > i)
        edges << i << ',' << e.target << ',' << format_double(e.dtilde) << ','
              << format_double(e.weight) << '\n';

  auto vertices = open_out(vertices_path);
  vertices << header_comment(config_hash);
  vertices << "index,boundary_flag";
  for (int k = 0; k < graph.cloud.dim; ++k) vertices << ",x" << k;
  vertices << '\n';
  for (std::size_t i = 0; i < graph.n(); ++i) {
    vertices << i << ',' << static_cast<int>(graph.boundary_mask[i]);
    const auto p = graph.cloud.point(i);
    for (int k = 0; k < graph.cloud.dim; ++k) vertices << ',' << format_double(p[k]);
    vertices << '\n';
  }
}

void save_solution(const Trajectory& traj, const std::string& path,
                   const std::string& config_hash) {
  auto out = open_out(path);
  out << header_comment(config_hash);
  out << "t,vertex_index,value\n";
  for (const auto& snap : traj.snapshots)
    for (std::size_t i = 0; i < snap.values.size(); ++i)
      out << format_double(snap.time) << ',' << i << ','
          << format_double(snap.values[i]) << '\n';
}

}  // namespace eikograph
