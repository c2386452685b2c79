#pragma once

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "disf/geometry.hpp"

namespace disf {

class MissingNormals : public InvalidInput {
 public:
  MissingNormals()
      : InvalidInput("PLY vertex element lacks nx/ny/nz properties") {}
};

namespace detail {

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<std::string> properties;
  bool has_list = false;
};

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

}  // namespace detail

// ASCII PLY (format ascii 1.0) with per-vertex x y z nx ny nz. Extra vertex
// properties and other elements are skipped. Normals are renormalized.
inline OrientedSurface read_ply(std::istream& in) {
  std::size_t line_no = 0;
  std::string line;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, line)) return false;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  };

  if (!next_line() || detail::split_ws(line) != std::vector<std::string>{"ply"})
    throw ParseError("missing 'ply' magic", line_no);

  std::vector<detail::PlyElement> elements;
  bool format_seen = false;
  for (;;) {
    if (!next_line()) throw ParseError("unexpected end of header", line_no);
    const auto tok = detail::split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() != 3 || tok[1] != "ascii" || tok[2] != "1.0")
        throw ParseError("only 'format ascii 1.0' is supported", line_no);
      format_seen = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw ParseError("malformed element line", line_no);
      detail::PlyElement e;
      e.name = tok[1];
      try {
        const long long n = std::stoll(tok[2]);
        if (n < 0) throw std::out_of_range("negative");
        e.count = static_cast<std::size_t>(n);
      } catch (const std::exception&) {
        throw ParseError("bad element count '" + tok[2] + "'", line_no);
      }
      elements.push_back(e);
    } else if (tok[0] == "property") {
      if (elements.empty())
        throw ParseError("property before any element", line_no);
      if (tok.size() == 5 && tok[1] == "list") {
        elements.back().has_list = true;
        elements.back().properties.push_back(tok[4]);
      } else if (tok.size() == 3) {
        elements.back().properties.push_back(tok[2]);
      } else {
        throw ParseError("malformed property line", line_no);
      }
    } else {
      throw ParseError("unknown header keyword '" + tok[0] + "'", line_no);
    }
  }
  if (!format_seen) throw ParseError("missing format line", line_no);

  const auto vertex = std::find_if(elements.begin(), elements.end(),
                                   [](const auto& e) { return e.name == "vertex"; });
  if (vertex == elements.end()) throw ParseError("no vertex element", line_no);
  if (vertex->has_list)
    throw ParseError("list properties on vertices are not supported", line_no);

  std::array<int, 6> slot{};
  const std::array<const char*, 6> names{"x", "y", "z", "nx", "ny", "nz"};
  for (int k = 0; k < 6; ++k) {
    const auto it = std::find(vertex->properties.begin(),
                              vertex->properties.end(), names[k]);
    if (it == vertex->properties.end()) {
      if (k >= 3) throw MissingNormals();
      throw ParseError(std::string("vertex element lacks '") + names[k] + "'",
                       line_no);
    }
    slot[k] = static_cast<int>(it - vertex->properties.begin());
  }

  OrientedSurface out;
  for (const auto& e : elements) {
    const bool is_vertex = &e == &*vertex;
    if (is_vertex) out.reserve(e.count);
    for (std::size_t i = 0; i < e.count; ++i) {
      if (!next_line())
        throw ParseError("unexpected end of data in element '" + e.name + "'",
                         line_no);
      if (!is_vertex) continue;
      const auto tok = detail::split_ws(line);
      if (tok.size() != e.properties.size())
        throw ParseError("expected " + std::to_string(e.properties.size()) +
                             " values, got " + std::to_string(tok.size()),
                         line_no);
      std::array<double, 6> v{};
      for (int k = 0; k < 6; ++k) {
        try {
          std::size_t used = 0;
          v[k] = std::stod(tok[slot[k]], &used);
          if (used != tok[slot[k]].size()) throw std::invalid_argument("tail");
        } catch (const std::exception&) {
          throw ParseError("bad number '" + tok[slot[k]] + "'", line_no);
        }
      }
      const Vec3 p(v[0], v[1], v[2]);
      if (!p.allFinite()) throw ParseError("non-finite coordinate", line_no);
      try {
        out.push_back({p, UnitVec3(v[3], v[4], v[5])});
      } catch (const InvalidInput& err) {
        throw ParseError(err.what(), line_no);
      }
    }
  }
  return out;
}

inline OrientedSurface load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  try {
    return read_ply(in);
  } catch (const ParseError& err) {
    throw ParseError(path.string() + ": " + err.what(), err.line());
  }
}

inline void write_ply(std::ostream& out, const OrientedSurface& surface) {
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << surface.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "property double nx\nproperty double ny\nproperty double nz\n"
      << "end_header\n";
  std::ostringstream row;
  row << std::setprecision(12);
  for (const auto& pn : surface) {
    row.str("");
    row << pn.point.x() << ' ' << pn.point.y() << ' ' << pn.point.z() << ' '
        << pn.normal[0] << ' ' << pn.normal[1] << ' ' << pn.normal[2] << '\n';
    out << row.str();
  }
}

inline void save_cloud(const std::filesystem::path& path,
                       const OrientedSurface& surface) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path.string() + "'");
  write_ply(out, surface);
}

}  // namespace disf
