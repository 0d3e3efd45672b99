#include "wplap/report_io.hpp"

#include "wplap/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace wplap {

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Provenance Provenance::of(const nlohmann::json& config, std::uint64_t seed) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
  Provenance p;
  p.config_hash = buf;
  p.seed = seed;
  return p;
}

nlohmann::json Provenance::to_json() const {
  return nlohmann::json{{"config_hash", config_hash}, {"seed", seed}, {"version", version}};
}

std::string Provenance::comment_line() const {
  return "# config_hash=" + config_hash + " seed=" + std::to_string(seed) + " version=" + version + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) raise(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) raise(ErrorKind::io, "cannot write " + path.string());
  os << content;
  if (!os) raise(ErrorKind::io, "failed writing " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    raise(ErrorKind::config, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

std::string nodal_csv(const DiscreteScalarField& u, const Provenance& prov) {
  std::ostringstream os;
  os.precision(17);
  os << prov.comment_line() << "node_id value\n";
  for (Eigen::Index v = 0; v < u.values.size(); ++v) os << v << ' ' << u.values(v) << '\n';
  return os.str();
}

std::string element_csv(const DiscreteVectorField& g, const Provenance& prov) {
  std::ostringstream os;
  os.precision(17);
  os << prov.comment_line() << "element_id gx gy\n";
  for (std::size_t t = 0; t < g.values.size(); ++t) os << t << ' ' << g.values[t].x() << ' ' << g.values[t].y() << '\n';
  return os.str();
}

DiscreteVectorField read_element_csv(const MeshPtr& mesh, const std::filesystem::path& path) {
  std::istringstream is(read_text(path));
  DiscreteVectorField f{mesh, {}};
  std::string line;
  while (std::getline(is, line)) {
    for (char& c : line) {
      if (c == ',') c = ' ';
    }
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> nums;
    double v = 0;
    while (ls >> v) nums.push_back(v);
    if (nums.empty()) continue;  // header
    if (nums.size() == 2) {
      f.values.emplace_back(nums[0], nums[1]);
    } else if (nums.size() == 3) {
      f.values.emplace_back(nums[1], nums[2]);
    } else {
      raise(ErrorKind::io, "element CSV " + path.string() + ": expected 2 or 3 numbers per row");
    }
  }
  if (f.values.size() != mesh->num_triangles()) {
    raise(ErrorKind::config, "element CSV " + path.string() + " has " + std::to_string(f.values.size()) +
                                 " rows for " + std::to_string(mesh->num_triangles()) + " elements");
  }
  return f;
}

}  // namespace wplap
