#pragma once

#include <string>
#include <vector>

#include "bsd/vec3.hpp"

namespace bsd {

/// CSV with header x,y,z,ux,uy,uz; 17 significant digits.
void write_field_csv(const std::string& path, const std::vector<Vec3>& points,
                     const std::vector<Vec3>& vectors);

/// Legacy ASCII VTK polydata with POINT_DATA VECTORS.
void write_field_vtk(const std::string& path, const std::vector<Vec3>& points,
                     const std::vector<Vec3>& vectors,
                     const std::string& name = "u");

/// Reads a CSV written by write_field_csv (header line optional).
void read_field_csv(const std::string& path, std::vector<Vec3>* points,
                    std::vector<Vec3>* vectors);

}  // namespace bsd
