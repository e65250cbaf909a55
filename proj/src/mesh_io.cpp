#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bsd/errors.hpp"
#include "bsd/mesh.hpp"

namespace bsd {

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream probe(line);
    std::string tok;
    if (probe >> tok) return line;
  }
  return {};
}

SurfaceMesh load_off(std::istream& in) {
  std::string header = next_content_line(in);
  {
    std::istringstream hs(header);
    std::string tag;
    hs >> tag;
    if (tag != "OFF") throw MeshError("not an OFF file (missing OFF header)");
  }
  std::istringstream counts(next_content_line(in));
  long nv = 0, nf = 0, ne = 0;
  if (!(counts >> nv >> nf >> ne)) throw MeshError("OFF: bad count line");

  std::vector<Vec3> verts(nv);
  for (long i = 0; i < nv; ++i) {
    std::istringstream ls(next_content_line(in));
    if (!(ls >> verts[i].x >> verts[i].y >> verts[i].z))
      throw MeshError("OFF: bad vertex line " + std::to_string(i));
  }
  std::vector<std::array<int, 3>> faces(nf);
  for (long i = 0; i < nf; ++i) {
    std::istringstream ls(next_content_line(in));
    int k = 0;
    if (!(ls >> k)) throw MeshError("OFF: bad face line " + std::to_string(i));
    if (k != 3) throw MeshError("OFF: face " + std::to_string(i) +
                                " has " + std::to_string(k) +
                                " vertices; triangles only");
    if (!(ls >> faces[i][0] >> faces[i][1] >> faces[i][2]))
      throw MeshError("OFF: bad face line " + std::to_string(i));
  }
  return build_surface(std::move(verts), std::move(faces));
}

SurfaceMesh load_obj(std::istream& in) {
  std::vector<Vec3> verts;
  std::vector<std::array<int, 3>> faces;
  std::string line;
  auto parse_index = [&](const std::string& tok) {
    // "v", "v/vt", "v/vt/vn", "v//vn": the vertex index leads.
    long idx = std::stol(tok.substr(0, tok.find('/')));
    if (idx < 0) idx = static_cast<long>(verts.size()) + idx + 1;
    return static_cast<int>(idx - 1);  // 1-based in file
  };
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 v;
      if (!(ls >> v.x >> v.y >> v.z)) throw MeshError("OBJ: bad vertex line");
      verts.push_back(v);
    } else if (tag == "f") {
      std::vector<std::string> toks;
      std::string t;
      while (ls >> t) toks.push_back(t);
      if (toks.size() != 3)
        throw MeshError("OBJ: face with " + std::to_string(toks.size()) +
                        " vertices; triangles only");
      faces.push_back({parse_index(toks[0]), parse_index(toks[1]),
                       parse_index(toks[2])});
    }
    // vn/vt/usemtl/etc. are ignored
  }
  return build_surface(std::move(verts), std::move(faces));
}

}  // namespace

SurfaceMesh load_surface(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError("cannot open mesh file: " + path);
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  if (ext == "off") return load_off(in);
  if (ext == "obj") return load_obj(in);
  throw MeshError("unsupported mesh format ." + ext + " (OFF or OBJ expected)");
}

}  // namespace bsd
