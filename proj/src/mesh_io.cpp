#include "quadkit/mesh_io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace quadkit {
namespace {

int resolve_index(const std::string& token, int count, int line_no) {
  const auto slash = token.find('/');
  const std::string head = token.substr(0, slash);
  int idx = 0;
  try {
    size_t used = 0;
    idx = std::stoi(head, &used);
    if (used != head.size()) throw std::invalid_argument(head);
  } catch (const std::exception&) {
    throw InputError("OBJ line " + std::to_string(line_no) + ": bad index '" + token + "'");
  }
  if (idx > 0) return idx - 1;
  if (idx < 0) return count + idx;
  throw InputError("OBJ line " + std::to_string(line_no) + ": zero index");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct PlyProperty {
  std::string name;
  std::string type;
  bool is_list = false;
  std::string count_type;
};

struct PlyElement {
  std::string name;
  size_t count = 0;
  std::vector<PlyProperty> props;
};

size_t ply_type_size(const std::string& t) {
  if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
  if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
  if (t == "int" || t == "uint" || t == "float" || t == "int32" || t == "uint32" ||
      t == "float32")
    return 4;
  if (t == "double" || t == "float64") return 8;
  throw InputError("PLY: unknown property type " + t);
}

double read_binary_value(std::istream& in, const std::string& t) {
  char buf[8];
  const size_t n = ply_type_size(t);
  if (!in.read(buf, static_cast<std::streamsize>(n))) throw InputError("PLY: truncated binary data");
  auto get = [&](auto v) {
    std::memcpy(&v, buf, sizeof v);
    return static_cast<double>(v);
  };
  if (t == "char" || t == "int8") return get(int8_t{});
  if (t == "uchar" || t == "uint8") return get(uint8_t{});
  if (t == "short" || t == "int16") return get(int16_t{});
  if (t == "ushort" || t == "uint16") return get(uint16_t{});
  if (t == "int" || t == "int32") return get(int32_t{});
  if (t == "uint" || t == "uint32") return get(uint32_t{});
  if (t == "float" || t == "float32") return get(float{});
  return get(double{});
}

}  // namespace

PolygonSoup read_obj(std::istream& in) {
  PolygonSoup soup;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z)) {
        throw InputError("OBJ line " + std::to_string(line_no) + ": malformed vertex");
      }
      soup.positions.emplace_back(x, y, z);
    } else if (tag == "f" || tag == "l") {
      std::vector<int> idx;
      std::string tok;
      const int count = static_cast<int>(soup.positions.size());
      while (ls >> tok) {
        if (tok[0] == '#') break;
        idx.push_back(resolve_index(tok, count, line_no));
      }
      if (tag == "f") {
        if (idx.size() < 3) {
          throw InputError("OBJ line " + std::to_string(line_no) + ": face with fewer than 3 vertices");
        }
        soup.faces.push_back(std::move(idx));
      } else if (idx.size() >= 2) {
        soup.lines.push_back(std::move(idx));
      }
    }
  }
  const int nv = static_cast<int>(soup.positions.size());
  for (const auto* group : {&soup.faces, &soup.lines}) {
    for (const auto& f : *group) {
      for (int v : f) {
        if (v < 0 || v >= nv) throw InputError("OBJ: vertex index out of range");
      }
    }
  }
  return soup;
}

PolygonSoup read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0) throw InputError("PLY: missing magic");
  std::string format;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "format") {
      ls >> format;
    } else if (kw == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (kw == "property") {
      if (elements.empty()) throw InputError("PLY: property before element");
      PlyProperty p;
      std::string t;
      ls >> t;
      if (t == "list") {
        p.is_list = true;
        ls >> p.count_type >> p.type >> p.name;
      } else {
        p.type = t;
        ls >> p.name;
      }
      elements.back().props.push_back(p);
    } else if (kw == "end_header") {
      break;
    }
  }
  const bool binary = format == "binary_little_endian";
  if (!binary && format != "ascii") throw InputError("PLY: unsupported format '" + format + "'");

  PolygonSoup soup;
  for (const auto& el : elements) {
    int ix = -1, iy = -1, iz = -1, iface = -1;
    for (size_t k = 0; k < el.props.size(); ++k) {
      const auto& n = el.props[k].name;
      if (n == "x") ix = static_cast<int>(k);
      if (n == "y") iy = static_cast<int>(k);
      if (n == "z") iz = static_cast<int>(k);
      if (el.props[k].is_list && (n == "vertex_indices" || n == "vertex_index")) iface = static_cast<int>(k);
    }
    for (size_t i = 0; i < el.count; ++i) {
      std::vector<double> scalars(el.props.size(), 0.0);
      std::vector<int> list;
      std::istringstream ls;
      if (!binary) {
        if (!std::getline(in, line)) throw InputError("PLY: truncated ascii data");
        ls.str(line);
      }
      for (size_t k = 0; k < el.props.size(); ++k) {
        const auto& p = el.props[k];
        if (p.is_list) {
          double cnt = 0;
          if (binary) {
            cnt = read_binary_value(in, p.count_type);
          } else if (!(ls >> cnt)) {
            throw InputError("PLY: malformed list");
          }
          std::vector<int> vals;
          for (int j = 0; j < static_cast<int>(cnt); ++j) {
            double v = 0;
            if (binary) {
              v = read_binary_value(in, p.type);
            } else if (!(ls >> v)) {
              throw InputError("PLY: malformed list");
            }
            vals.push_back(static_cast<int>(v));
          }
          if (static_cast<int>(k) == iface) list = std::move(vals);
        } else if (binary) {
          scalars[k] = read_binary_value(in, p.type);
        } else if (!(ls >> scalars[k])) {
          throw InputError("PLY: malformed element '" + el.name + "'");
        }
      }
      if (el.name == "vertex") {
        if (ix < 0 || iy < 0 || iz < 0) throw InputError("PLY: vertex without x/y/z");
        soup.positions.emplace_back(scalars[ix], scalars[iy], scalars[iz]);
      } else if (el.name == "face" && iface >= 0) {
        if (list.size() < 3) throw InputError("PLY: face with fewer than 3 vertices");
        soup.faces.push_back(std::move(list));
      }
    }
  }
  const int nv = static_cast<int>(soup.positions.size());
  for (const auto& f : soup.faces) {
    for (int v : f) {
      if (v < 0 || v >= nv) throw InputError("PLY: vertex index out of range");
    }
  }
  return soup;
}

PolygonSoup read_polygon_soup(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".ply") return read_ply(in);
  if (ext == ".obj") return read_obj(in);
  throw InputError("unsupported mesh format '" + ext + "' (expected .obj or .ply)");
}

int merge_exact_duplicates(PolygonSoup& soup) {
  std::map<std::array<double, 3>, int> seen;
  std::vector<int> remap(soup.positions.size());
  std::vector<Vec3> unique;
  for (size_t i = 0; i < soup.positions.size(); ++i) {
    const auto& p = soup.positions[i];
    auto [it, inserted] = seen.emplace(std::array<double, 3>{p.x(), p.y(), p.z()},
                                       static_cast<int>(unique.size()));
    if (inserted) unique.push_back(p);
    remap[i] = it->second;
  }
  const int merged = static_cast<int>(soup.positions.size() - unique.size());
  if (merged == 0) return 0;
  soup.positions = std::move(unique);
  for (auto* group : {&soup.faces, &soup.lines}) {
    for (auto& f : *group) {
      for (int& v : f) v = remap[v];
    }
  }
  return merged;
}

LoadedMesh load_mesh_from_soup(PolygonSoup soup, bool diagnostic) {
  LoadedMesh out;
  const int merged = merge_exact_duplicates(soup);
  BuildOptions options;
  options.diagnostic = diagnostic;
  out.lines = soup.lines;
  out.mesh = Mesh::from_soup(soup, options, &out.report);
  out.report.duplicate_vertices_merged = merged;
  out.kind = out.mesh.kind();
  return out;
}

LoadedMesh load_mesh(const std::filesystem::path& path, bool diagnostic) {
  return load_mesh_from_soup(read_polygon_soup(path), diagnostic);
}

void write_obj(std::ostream& out, const std::vector<Vec3>& positions,
               const std::vector<std::vector<int>>& faces,
               const std::vector<std::vector<int>>& lines) {
  for (const auto& p : positions) {
    out << "v " << format_double(p.x()) << ' ' << format_double(p.y()) << ' '
        << format_double(p.z()) << '\n';
  }
  for (const auto& f : faces) {
    out << 'f';
    for (int v : f) out << ' ' << v + 1;
    out << '\n';
  }
  for (const auto& l : lines) {
    out << 'l';
    for (int v : l) out << ' ' << v + 1;
    out << '\n';
  }
}

void write_obj(const std::filesystem::path& path, const std::vector<Vec3>& positions,
               const std::vector<std::vector<int>>& faces,
               const std::vector<std::vector<int>>& lines) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_obj(out, positions, faces, lines);
}

void write_obj(const std::filesystem::path& path, const Mesh& mesh,
               const std::vector<std::vector<int>>& lines) {
  write_obj(path, mesh.positions(), mesh.face_polygons(), lines);
}

void write_ply_colored(const std::filesystem::path& path, const std::vector<Vec3>& positions,
                       const std::vector<std::vector<int>>& faces,
                       const std::vector<Rgb>& vertex_colors) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "ply\nformat ascii 1.0\n"
      << "element vertex " << positions.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "element face " << faces.size() << "\n"
      << "property list uchar int vertex_indices\nend_header\n";
  for (size_t i = 0; i < positions.size(); ++i) {
    const Rgb c = i < vertex_colors.size() ? vertex_colors[i] : Rgb{200, 200, 200};
    out << format_double(positions[i].x()) << ' ' << format_double(positions[i].y()) << ' '
        << format_double(positions[i].z()) << ' ' << int(c[0]) << ' ' << int(c[1]) << ' '
        << int(c[2]) << '\n';
  }
  for (const auto& f : faces) {
    out << f.size();
    for (int v : f) out << ' ' << v;
    out << '\n';
  }
}

}  // namespace quadkit
