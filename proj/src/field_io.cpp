#include "bsd/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bsd {

void write_field_csv(const std::string& path, const std::vector<Vec3>& points,
                     const std::vector<Vec3>& vectors) {
  if (points.size() != vectors.size())
    throw std::invalid_argument("write_field_csv: size mismatch");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "x,y,z,ux,uy,uz\n");
  for (size_t i = 0; i < points.size(); ++i)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", points[i].x,
                 points[i].y, points[i].z, vectors[i].x, vectors[i].y,
                 vectors[i].z);
  std::fclose(f);
}

void write_field_vtk(const std::string& path, const std::vector<Vec3>& points,
                     const std::vector<Vec3>& vectors, const std::string& name) {
  if (points.size() != vectors.size())
    throw std::invalid_argument("write_field_vtk: size mismatch");
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open " + path);
  std::fprintf(f, "# vtk DataFile Version 3.0\n");
  std::fprintf(f, "bsd vector field\n");
  std::fprintf(f, "ASCII\n");
  std::fprintf(f, "DATASET POLYDATA\n");
  std::fprintf(f, "POINTS %zu double\n", points.size());
  for (const Vec3& p : points)
    std::fprintf(f, "%.17g %.17g %.17g\n", p.x, p.y, p.z);
  std::fprintf(f, "POINT_DATA %zu\n", points.size());
  std::fprintf(f, "VECTORS %s double\n", name.c_str());
  for (const Vec3& v : vectors)
    std::fprintf(f, "%.17g %.17g %.17g\n", v.x, v.y, v.z);
  std::fclose(f);
}

void read_field_csv(const std::string& path, std::vector<Vec3>* points,
                    std::vector<Vec3>* vectors) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  points->clear();
  vectors->clear();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    Vec3 p, v;
    if (!(ls >> p.x >> p.y >> p.z >> v.x >> v.y >> v.z)) continue;  // header
    points->push_back(p);
    vectors->push_back(v);
  }
}

}  // namespace bsd
