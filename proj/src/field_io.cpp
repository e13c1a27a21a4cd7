#include "quadkit/field_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace quadkit {
namespace {

using json = nlohmann::json;

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 json_vec(const json& j) {
  if (!j.is_array() || j.size() != 3) throw InputError("field file: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::array<double, 22> flatten(const FieldSample& s) {
  std::array<double, 22> out{};
  int k = 0;
  auto put = [&](const Vec3& v) {
    for (int i = 0; i < 3; ++i) out[k++] = v[i];
  };
  put(s.position);
  put(s.normal);
  out[k++] = s.cdf;
  out[k++] = s.dcdf;
  put(s.grad_cdf);
  put(s.grad_dcdf);
  put(s.offset_center);
  put(s.offset_dual);
  return out;
}

FieldSample unflatten(const std::array<double, 22>& a) {
  FieldSample s;
  int k = 0;
  auto get = [&]() {
    Vec3 v(a[k], a[k + 1], a[k + 2]);
    k += 3;
    return v;
  };
  s.position = get();
  s.normal = get();
  s.cdf = a[k++];
  s.dcdf = a[k++];
  s.grad_cdf = get();
  s.grad_dcdf = get();
  s.offset_center = get();
  s.offset_dual = get();
  return s;
}

constexpr char kMagic[4] = {'Q', 'K', 'F', '1'};

}  // namespace

void write_fields_json(const std::filesystem::path& path, const std::vector<FieldSample>& samples) {
  json arr = json::array();
  for (const auto& s : samples) {
    arr.push_back({{"pos", vec_json(s.position)},
                   {"normal", vec_json(s.normal)},
                   {"cdf", s.cdf},
                   {"dcdf", s.dcdf},
                   {"gcdf", vec_json(s.grad_cdf)},
                   {"gdcdf", vec_json(s.grad_dcdf)},
                   {"off_c", vec_json(s.offset_center)},
                   {"off_dc", vec_json(s.offset_dual)}});
  }
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << arr.dump() << "\n";
}

std::vector<FieldSample> read_fields_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open field file " + path.string());
  json arr;
  try {
    in >> arr;
  } catch (const json::exception& e) {
    throw InputError("field file " + path.string() + ": " + e.what());
  }
  if (!arr.is_array()) throw InputError("field file: expected an array of records");
  std::vector<FieldSample> out;
  out.reserve(arr.size());
  try {
    for (const auto& r : arr) {
      FieldSample s;
      s.position = json_vec(r.at("pos"));
      s.normal = json_vec(r.at("normal"));
      s.cdf = r.at("cdf").get<double>();
      s.dcdf = r.at("dcdf").get<double>();
      s.grad_cdf = json_vec(r.at("gcdf"));
      s.grad_dcdf = json_vec(r.at("gdcdf"));
      s.offset_center = json_vec(r.at("off_c"));
      s.offset_dual = json_vec(r.at("off_dc"));
      out.push_back(s);
    }
  } catch (const json::exception& e) {
    throw InputError("field file " + path.string() + ": " + e.what());
  }
  return out;
}

void write_fields_binary(const std::filesystem::path& path,
                         const std::vector<FieldSample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out.write(kMagic, 4);
  const uint64_t n = samples.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  for (const auto& s : samples) {
    const auto rec = flatten(s);
    out.write(reinterpret_cast<const char*>(rec.data()), sizeof rec);
  }
}

std::vector<FieldSample> read_fields_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open field file " + path.string());
  char magic[4];
  uint64_t n = 0;
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0 ||
      !in.read(reinterpret_cast<char*>(&n), sizeof n)) {
    throw InputError("field file " + path.string() + ": bad header");
  }
  std::vector<FieldSample> out;
  for (uint64_t i = 0; i < n; ++i) {
    std::array<double, 22> rec;
    if (!in.read(reinterpret_cast<char*>(rec.data()), sizeof rec)) {
      throw InputError("field file " + path.string() + ": truncated");
    }
    out.push_back(unflatten(rec));
  }
  return out;
}

std::vector<FieldSample> read_fields(const std::filesystem::path& path) {
  if (path.extension() == ".json") return read_fields_json(path);
  return read_fields_binary(path);
}

void write_fields(const std::filesystem::path& path, const std::vector<FieldSample>& samples) {
  if (path.extension() == ".json") {
    write_fields_json(path, samples);
  } else {
    write_fields_binary(path, samples);
  }
}

Rgb field_color(double value) {
  // Piecewise-linear jet: dark blue, blue, cyan, yellow, red, dark red.
  static const std::array<std::array<double, 3>, 6> stops{{{0.0, 0.0, 0.5},
                                                           {0.0, 0.0, 1.0},
                                                           {0.0, 1.0, 1.0},
                                                           {1.0, 1.0, 0.0},
                                                           {1.0, 0.0, 0.0},
                                                           {0.5, 0.0, 0.0}}};
  const double t = std::clamp(value, 0.0, 1.0) * 5.0;
  const int i = std::min(static_cast<int>(t), 4);
  const double f = t - i;
  Rgb out;
  for (int c = 0; c < 3; ++c) {
    const double x = (1 - f) * stops[i][c] + f * stops[i + 1][c];
    out[c] = static_cast<uint8_t>(std::lround(255.0 * x));
  }
  return out;
}

}  // namespace quadkit
