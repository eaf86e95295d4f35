#include <cstdio>
#include <fstream>
#include <sstream>

#include "dexfit/geometry.hpp"

namespace dexfit {

TriMesh parse_mesh(const std::string& text) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    auto fail = [&] {
      throw Error("mesh line " + std::to_string(line_no) + ": cannot parse '" + line + "'");
    };
    if (tag == "v") {
      Vec3 v;
      if (!(fields >> v.x() >> v.y() >> v.z())) fail();
      vertices.push_back(v);
    } else if (tag == "f") {
      Face f;
      if (!(fields >> f[0] >> f[1] >> f[2])) fail();
      faces.push_back(f);
    } else {
      fail();
    }
    std::string rest;
    if (fields >> rest) fail();
  }
  return TriMesh(std::move(vertices), std::move(faces));
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open mesh file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str());
}

std::string format_mesh(const TriMesh& mesh) {
  std::string out;
  char line[128];
  for (const auto& v : mesh.vertices()) {
    std::snprintf(line, sizeof line, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out += line;
  }
  for (const auto& f : mesh.faces()) {
    std::snprintf(line, sizeof line, "f %d %d %d\n", f[0], f[1], f[2]);
    out += line;
  }
  return out;
}

void write_mesh(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write mesh file " + path);
  out << format_mesh(mesh);
}

}  // namespace dexfit
